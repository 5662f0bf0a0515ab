"""Surface definitions Psi(s, t) in E^4 and their exact derivative jets.

A definition document is line-oriented UTF-8 text::

    [surface]
    x = (sin(s)+s)/2
    y = cos(s)/sqrt(2)
    z = (sin(s)-s)/2
    w = -t/(2*sqrt(2))
    [domain]
    s = 0 .. 4*pi
    t = -1 .. 1
    ns = 257
    nt = 65
    [params]
    s0 = 0
    c23 = 0
    c24 = 0
    c34 = 0

Range bounds accept any constant expression.  ``[params]`` is optional:
``s0`` defaults to the lower end of the s-range and the integration
constants default to zero.  Unknown sections or keys are rejected.
"""
import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import exprlang
from .errors import BadDomain, DefinitionError, DomainError, NotUnitSpeed
from .linalg4 import inner, norm, ternary_cross

COMPONENTS = ("x", "y", "z", "w")
JET_NAMES = (
    "psi", "psi_s", "psi_ss", "psi_sss", "psi_ssss", "psi_sssss", "psi_t", "psi_st", "psi_tt",
)
# derivative recipe for each jet entry, applied left to right
_JET_RECIPES = {
    "psi": "",
    "psi_s": "s",
    "psi_ss": "ss",
    "psi_sss": "sss",
    "psi_ssss": "ssss",
    "psi_sssss": "sssss",
    "psi_t": "t",
    "psi_st": "st",
    "psi_tt": "tt",
}
UNIT_SPEED_TOL = 1e-8
MIN_GRID = 8


@dataclass(frozen=True)
class Jet:
    """Psi and its derivatives at one point (each a 4-vector, or a grid of them)."""

    psi: np.ndarray
    psi_s: np.ndarray
    psi_ss: np.ndarray
    psi_sss: np.ndarray
    psi_ssss: np.ndarray
    psi_sssss: np.ndarray
    psi_t: np.ndarray
    psi_st: np.ndarray
    psi_tt: np.ndarray


@dataclass(frozen=True)
class SurfaceDef:
    components: tuple
    s_range: tuple
    t_range: tuple
    ns: int
    nt: int
    params: dict = field(default_factory=dict)
    name: str = "surface"
    jets: dict = field(default=None, repr=False, compare=False)

    @property
    def s0(self):
        return self.params["s0"]

    @property
    def constants(self):
        return (self.params["c23"], self.params["c24"], self.params["c34"])

    @property
    def s_grid(self):
        return np.linspace(self.s_range[0], self.s_range[1], self.ns)

    @property
    def t_grid(self):
        return np.linspace(self.t_range[0], self.t_range[1], self.nt)

    def evaluate(self, which, s, t):
        """Evaluate one jet entry at ``(s, t)``; the result has a trailing axis of 4."""
        exprs = self.jets[which]
        s = np.asarray(s, float)
        t = np.asarray(t, float)
        shape = np.broadcast_shapes(s.shape, t.shape)
        out = np.empty(shape + (4,))
        for i, e in enumerate(exprs):
            out[..., i] = exprlang.evaluate(e, s, t)
        return out

    def jet(self, s, t):
        return jet(self, s, t)

    def expressions(self):
        return {c: exprlang.to_string(e) for c, e in zip(COMPONENTS, self.components)}


def _build_jets(components):
    jets = {}
    cache = {"": tuple(components)}
    for name, recipe in _JET_RECIPES.items():
        for n in range(1, len(recipe) + 1):
            key = recipe[:n]
            if key not in cache:
                cache[key] = tuple(
                    exprlang.differentiate(e, key[-1]) for e in cache[key[:-1]]
                )
        jets[name] = cache[recipe]
    return jets


def make_surface(components, s_range, t_range, ns, nt, params=None, name="surface",
                 validate=True):
    """Build a :class:`SurfaceDef` from four expressions (text or :class:`Expr`).

    With ``validate`` the unit-speed condition is checked on the whole grid
    and :class:`NotUnitSpeed` names the worst grid point.
    """
    if len(components) != 4:
        raise DefinitionError("a surface needs exactly four components")
    exprs = tuple(
        exprlang.parse(c) if isinstance(c, str) else c for c in components
    )
    s_range = tuple(float(x) for x in s_range)
    t_range = tuple(float(x) for x in t_range)
    for label, (lo, hi) in (("s", s_range), ("t", t_range)):
        if not (np.isfinite(lo) and np.isfinite(hi)) or hi - lo <= 0:
            raise BadDomain("%s-range must have positive length, got %r" % (label, (lo, hi)))
    ns, nt = int(ns), int(nt)
    if ns < MIN_GRID or nt < MIN_GRID:
        raise BadDomain("grid counts must be at least %d, got ns=%d nt=%d" % (MIN_GRID, ns, nt))
    merged = {"s0": s_range[0], "c23": 0.0, "c24": 0.0, "c34": 0.0}
    for key, value in (params or {}).items():
        if key not in merged:
            raise DefinitionError("unknown parameter %r" % key)
        merged[key] = float(value)
    if not s_range[0] <= merged["s0"] <= s_range[1]:
        raise BadDomain("s0 = %g lies outside the s-range" % merged["s0"])
    sd = SurfaceDef(exprs, s_range, t_range, ns, nt, merged, name, _build_jets(exprs))
    if validate:
        validate_unit_speed(sd)
    return sd


def grid_jet(sd, s=None, t=None):
    """Jet on the tensor grid ``s x t`` (defaults: the surface grid); arrays (ns, nt, 4)."""
    s = sd.s_grid if s is None else np.asarray(s, float)
    t = sd.t_grid if t is None else np.asarray(t, float)
    S, T = np.meshgrid(s, t, indexing="ij")
    return jet(sd, S, T)


def unit_speed_residuals(sd):
    jt = grid_jet_entry(sd, "psi_s")
    return np.abs(inner(jt, jt) - 1.0)


def grid_jet_entry(sd, which):
    S, T = np.meshgrid(sd.s_grid, sd.t_grid, indexing="ij")
    try:
        return sd.evaluate(which, S, T)
    except DomainError as exc:
        raise BadDomain("surface is not defined on its whole grid: %s" % exc) from exc


def validate_unit_speed(sd, tol=UNIT_SPEED_TOL):
    res = unit_speed_residuals(sd)
    i, j = np.unravel_index(np.argmax(res), res.shape)
    if res[i, j] >= tol:
        raise NotUnitSpeed(sd.s_grid[i], sd.t_grid[j], float(res[i, j]))
    return float(res[i, j])


def jet(sd, s, t):
    """All seven derivative vectors at ``(s, t)`` (scalars or broadcastable arrays)."""
    return Jet(**{name: sd.evaluate(name, s, t) for name in JET_NAMES})


def bdr_residual(sd, s, t):
    """``|psi_t - psi_s x psi_ss x psi_sss|`` at ``(s, t)``."""
    j = jet(sd, s, t)
    return norm(j.psi_t - ternary_cross(j.psi_s, j.psi_ss, j.psi_sss))


def unit_speed_residual(sd, s, t):
    """``|<psi_s, psi_s> - 1|`` at ``(s, t)``."""
    v = sd.evaluate("psi_s", s, t)
    return np.abs(inner(v, v) - 1.0)


def g12_residual(sd, s, t):
    """``|<psi_s, psi_t>|``; zero for B-DR solutions since psi_t is normal."""
    j = jet(sd, s, t)
    return np.abs(inner(j.psi_s, j.psi_t))


# --------------------------------------------------------------------------
# Definition documents
# --------------------------------------------------------------------------

_SECTIONS = {
    "surface": set(COMPONENTS),
    "domain": {"s", "t", "ns", "nt"},
    "params": {"s0", "c23", "c24", "c34"},
}


def _constant(text, what):
    e = exprlang.parse(text)
    if exprlang.free_variables(e):
        raise BadDomain("%s must be a constant expression, got %r" % (what, text))
    return exprlang.evaluate(e)


def _range(text, what):
    parts = text.split("..")
    if len(parts) != 2:
        raise BadDomain("%s must look like 'lo .. hi', got %r" % (what, text))
    return tuple(_constant(p.strip(), what) for p in parts)


def _count(text, what):
    try:
        return int(text)
    except ValueError:
        raise BadDomain("%s must be an integer, got %r" % (what, text)) from None


def loads_surface(text, name="surface", validate=True):
    """Parse a definition document from a string."""
    cp = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#",),
        interpolation=None,
        default_section="\0no-defaults",
    )
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise DefinitionError("malformed definition document: %s" % exc) from exc
    for section in cp.sections():
        if section not in _SECTIONS:
            raise DefinitionError("unknown section [%s]" % section)
        unknown = set(cp[section]) - _SECTIONS[section]
        if unknown:
            raise DefinitionError(
                "unknown key(s) in [%s]: %s" % (section, ", ".join(sorted(unknown)))
            )
    for section in ("surface", "domain"):
        if section not in cp:
            raise DefinitionError("missing section [%s]" % section)
        missing = _SECTIONS[section] - set(cp[section])
        if missing:
            raise DefinitionError(
                "missing key(s) in [%s]: %s" % (section, ", ".join(sorted(missing)))
            )
    surf, dom = cp["surface"], cp["domain"]
    components = [exprlang.parse(surf[c]) for c in COMPONENTS]
    params = {}
    if "params" in cp:
        params = {k: _constant(v, k) for k, v in cp["params"].items()}
    return make_surface(
        components,
        _range(dom["s"], "s-range"),
        _range(dom["t"], "t-range"),
        _count(dom["ns"], "ns"),
        _count(dom["nt"], "nt"),
        params,
        name=name,
        validate=validate,
    )


def load_surface(path, validate=True):
    """Read a definition document from ``path``; the surface is named after the file stem."""
    path = Path(path)
    return loads_surface(path.read_text(encoding="utf-8"), name=path.stem, validate=validate)


def dumps_surface(sd):
    """Serialize back to the definition-document format."""
    lines = ["[surface]"]
    lines += ["%s = %s" % (c, e) for c, e in sd.expressions().items()]
    lines += [
        "[domain]",
        "s = %r .. %r" % sd.s_range,
        "t = %r .. %r" % sd.t_range,
        "ns = %d" % sd.ns,
        "nt = %d" % sd.nt,
        "[params]",
    ]
    lines += ["%s = %r" % (k, sd.params[k]) for k in ("s0", "c23", "c24", "c34")]
    return "\n".join(lines) + "\n"
