"""JSON scene schema and the small arithmetic expression grammar.

Scene files describe a scatterer declaratively:

    {
      "dimension": 2,
      "wavenumber": 1.0,
      "domain": {"kind": "ball", "center": [0, 0], "radius": 1.0},
      "intensity": {"kind": "constant", "value": 1.0},
      "incident": {"kind": "plane_wave", "direction": [1, 0]}
    }

Domain kinds: ball, annulus, box, star, capped, union.  Intensity and
contrast kinds: constant (scalar or [re, im]), expression (grammar
below, coordinates x1..xn), grid (npz with origin/spacing/values,
nearest-cell lookup, zero outside).  Incident kinds: plane_wave,
herglotz (density expression in the angle t), cgo (tau).

Expression grammar (recursive descent, no eval):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' factor)?
    unary  := '-' unary | atom
    atom   := number | x1..x3 | t | (exp|sin|cos) '(' expr ')' | '(' expr ')'
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from .geometry import (
    AnnulusComponent,
    BallComponent,
    BoxComponent,
    CappedComponent,
    Domain,
    StarComponent,
    make_curvature_cap,
)
from .medium import CgoIncident, HerglotzWave, MediumScene, PlaneWave
from .source import SourceScene

__all__ = [
    "SceneError",
    "parse_expression",
    "load_domain",
    "domain_to_spec",
    "load_source_scene",
    "load_medium_scene",
    "read_json",
]


class SceneError(ValueError):
    """Malformed scene configuration."""


# ---------------------------------------------------------------------------
# Expression parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SceneError(f"bad token at position {pos}: {text[pos:pos+10]!r}")
        if m.group("num") is not None:
            out.append(("num", float(m.group("num"))))
        elif m.group("name") is not None:
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise SceneError(f"expected {op!r}, found {val!r}")

    def parse(self):
        node = self.expr()
        if self.pos != len(self.tokens):
            raise SceneError("trailing tokens in expression")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            node = (
                (lambda a, b: lambda env: a(env) + b(env))
                if op == "+"
                else (lambda a, b: lambda env: a(env) - b(env))
            )(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.factor()
            node = (
                (lambda a, b: lambda env: a(env) * b(env))
                if op == "*"
                else (lambda a, b: lambda env: a(env) / b(env))
            )(node, rhs)
        return node

    def factor(self):
        # Unary minus binds looser than the power: -x^2 = -(x^2).
        if self.peek() == ("op", "-"):
            self.take()
            inner = self.factor()
            return lambda env, a=inner: -a(env)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            expo = self.factor()  # right associative, absorbs unary minus
            return lambda env, a=base, b=expo: a(env) ** b(env)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return lambda env, c=val: c
        if kind == "name":
            if val in _FUNCS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return lambda env, f=_FUNCS[val], a=arg: f(a(env))
            if val in self.variables:
                idx = self.variables.index(val)
                return lambda env, i=idx: env[i]
            raise SceneError(f"unknown identifier {val!r}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise SceneError(f"unexpected token {val!r}")


def parse_expression(text: str, variables=("x1", "x2", "x3")):
    """Compile an expression into fn(pts) -> values over point columns."""
    node = _Parser(_tokenize(text), list(variables)).parse()

    def fn(pts):
        pts = np.atleast_2d(pts)
        env = [pts[:, i] if i < pts.shape[1] else 0.0 for i in range(len(variables))]
        return node(env) * np.ones(pts.shape[0])

    return fn


def parse_angle_expression(text: str):
    node = _Parser(_tokenize(text), ["t"]).parse()

    def fn(angles):
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        if angles.ndim > 1:
            angles = angles[:, 0]
        return node([angles]) * np.ones(angles.shape[0])

    return fn


# ---------------------------------------------------------------------------
# Scene assembly
# ---------------------------------------------------------------------------


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SceneError(f"cannot read scene file {path}: {exc}") from exc


def _component(spec: dict, dim: int):
    kind = spec.get("kind")
    try:
        if kind == "ball":
            return BallComponent(spec["center"], spec["radius"], dim=dim)
        if kind == "annulus":
            return AnnulusComponent(
                spec["center"], spec["r_inner"], spec["r_outer"], dim=dim
            )
        if kind == "box":
            return BoxComponent(spec["lo"], spec["hi"])
        if kind == "star":
            r0 = spec["r0"]
            cos_c = spec.get("cos_coeffs", [])
            sin_c = spec.get("sin_coeffs", [])

            def radial(th, r0=r0, cos_c=cos_c, sin_c=sin_c):
                out = np.full_like(np.asarray(th, dtype=float), r0)
                for j, c in enumerate(cos_c, start=1):
                    out = out + r0 * c * np.cos(j * th)
                for j, c in enumerate(sin_c, start=1):
                    out = out + r0 * c * np.sin(j * th)
                return out

            return StarComponent(spec.get("center", [0.0] * dim), radial)
        if kind == "capped":
            cap = make_curvature_cap(
                spec["K"],
                spec.get("cubic", 0.0),
                L=spec.get("L", 1.0),
                M=spec.get("M", 2.0),
                delta=spec.get("delta", 0.5),
                n=dim,
            )
            return CappedComponent(
                cap,
                bulk_width=spec.get("bulk_width", 0.35),
                bulk_height=spec.get("bulk_height", 0.5),
                apex=spec.get("apex"),
            )
    except KeyError as exc:
        raise SceneError(f"domain spec missing field {exc}") from exc
    raise SceneError(f"unknown domain kind {kind!r}")


def load_domain(spec: dict, dim: int) -> Domain:
    if not isinstance(spec, dict):
        raise SceneError("domain must be an object")
    if spec.get("kind") == "union":
        comps = [_component(c, dim) for c in spec.get("components", [])]
        if not comps:
            raise SceneError("union domain needs at least one component")
        return Domain(comps, well_separated=bool(spec.get("well_separated", False)))
    return Domain([_component(spec, dim)])


def _component_spec(comp) -> dict:
    if isinstance(comp, BallComponent):
        return {
            "kind": "ball",
            "center": comp.center.tolist(),
            "radius": comp.radius,
        }
    if isinstance(comp, AnnulusComponent):
        return {
            "kind": "annulus",
            "center": comp.center.tolist(),
            "r_inner": comp.r_inner,
            "r_outer": comp.r_outer,
        }
    if isinstance(comp, BoxComponent):
        return {"kind": "box", "lo": comp.lo.tolist(), "hi": comp.hi.tolist()}
    if isinstance(comp, CappedComponent):
        return {
            "kind": "capped",
            "K": comp.cap.K,
            "cubic": comp.cap.c3,
            "L": comp.cap.L,
            "M": comp.cap.M,
            "delta": comp.cap.delta,
            "bulk_width": comp.bulk_width,
            "bulk_height": comp.bulk_height,
            "apex": comp.apex.tolist(),
        }
    raise SceneError(f"component {type(comp).__name__} has no JSON form")


def domain_to_spec(domain: Domain) -> dict:
    """Inverse of ``load_domain`` for the closed-form component kinds."""
    if len(domain.components) == 1 and not domain.well_separated:
        return _component_spec(domain.components[0])
    return {
        "kind": "union",
        "components": [_component_spec(c) for c in domain.components],
        "well_separated": domain.well_separated,
    }


def _field_fn(spec: dict, dim: int):
    kind = spec.get("kind")
    if kind == "constant":
        val = spec.get("value", 1.0)
        if isinstance(val, (list, tuple)):
            val = complex(val[0], val[1])
        return complex(val)
    if kind == "expression":
        return parse_expression(spec["expr"], [f"x{i+1}" for i in range(dim)])
    if kind == "grid":
        data = np.load(spec["path"])
        origin = np.asarray(data["origin"], dtype=float)
        spacing = float(data["spacing"])
        values = np.asarray(data["values"])

        def fn(pts):
            idx = np.round((np.atleast_2d(pts) - origin) / spacing).astype(int)
            ok = np.all((idx >= 0) & (idx < np.array(values.shape)), axis=1)
            out = np.zeros(pts.shape[0], dtype=complex)
            out[ok] = values[tuple(idx[ok].T)]
            return out

        return fn
    raise SceneError(f"unknown field kind {kind!r}")


def _incident(spec: dict):
    kind = spec.get("kind")
    if kind == "plane_wave":
        return PlaneWave(np.asarray(spec["direction"], dtype=float))
    if kind == "herglotz":
        return HerglotzWave(
            parse_angle_expression(spec["density"]), n_quad=spec.get("n_quad", 256)
        )
    if kind == "cgo":
        tau = float(spec["tau"])
        n = int(spec.get("dimension", 2))
        rho = np.zeros(n, dtype=complex)
        rho[0] = 1j * tau
        rho[-1] = -tau
        return CgoIncident(rho)
    raise SceneError(f"unknown incident kind {kind!r}")


def load_source_scene(cfg: dict) -> SourceScene:
    try:
        dim = int(cfg["dimension"])
        k = float(cfg["wavenumber"])
        domain = load_domain(cfg["domain"], dim)
        phi = _field_fn(cfg["intensity"], dim)
    except KeyError as exc:
        raise SceneError(f"scene missing field {exc}") from exc
    return SourceScene(domain, phi, k, dim)


def load_medium_scene(cfg: dict) -> MediumScene:
    try:
        dim = int(cfg["dimension"])
        k = float(cfg["wavenumber"])
        domain = load_domain(cfg["domain"], dim)
        phi = _field_fn(cfg["contrast"], dim)
        incident = _incident(cfg.get("incident", {"kind": "plane_wave", "direction": [1.0] + [0.0] * (dim - 1)}))
    except KeyError as exc:
        raise SceneError(f"scene missing field {exc}") from exc
    return MediumScene(domain, phi, k, incident, dim)
