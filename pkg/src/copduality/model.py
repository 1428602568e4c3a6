"""Copositive systems A(x) = A0 + sum_m x_m A_m and the lifted vectors built from them.

Indices ``k`` into {1..p} are 1-based wherever they leave this module
(reports, files); internally everything is 0-based.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Sequence

Mat = tuple[tuple[Fraction, ...], ...]

FIXTURES = ("ex1", "ex2", "ex3")


class ProblemFormatError(ValueError):
    """Raised for malformed or inconsistent problem files."""


@dataclass(frozen=True)
class CopSystem:
    matrices: tuple[Mat, ...]
    name: str = ""
    parameters: dict = field(default_factory=dict, compare=False, hash=False)
    metadata: dict = field(default_factory=dict, compare=False, hash=False)
    immobile_hint: Optional[tuple[tuple[tuple[Fraction, ...], ...], ...]] = field(
        default=None, compare=False, hash=False)

    def __post_init__(self):
        mats = tuple(tuple(tuple(Fraction(v) for v in row) for row in M) for M in self.matrices)
        object.__setattr__(self, "matrices", mats)
        if len(mats) < 2:
            raise ProblemFormatError("need A0 and at least one A_m (n >= 1)")
        p = len(mats[0])
        if p < 2:
            raise ProblemFormatError("matrix order p must be at least 2")
        for i, M in enumerate(mats):
            if len(M) != p or any(len(r) != p for r in M):
                raise ProblemFormatError(f"matrix {i} is not {p}x{p}")
            for r in range(p):
                for c in range(r + 1, p):
                    if M[r][c] != M[c][r]:
                        raise ProblemFormatError(
                            f"matrix {i} is not symmetric: entry [{r + 1},{c + 1}] = {M[r][c]} "
                            f"but entry [{c + 1},{r + 1}] = {M[c][r]}")

    @property
    def n(self) -> int:
        return len(self.matrices) - 1

    @property
    def p(self) -> int:
        return len(self.matrices[0])

    def with_matrices(self, matrices) -> "CopSystem":
        return CopSystem(matrices, name=self.name, parameters=dict(self.parameters),
                         metadata=dict(self.metadata), immobile_hint=self.immobile_hint)


# -- small exact helpers -------------------------------------------------

def quad(D: Mat, t: Sequence[Fraction]) -> Fraction:
    return bilinear(D, t, t)


def bilinear(D: Mat, s: Sequence[Fraction], t: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for i, si in enumerate(s):
        if si:
            row = D[i]
            acc = Fraction(0)
            for j, tj in enumerate(t):
                if tj and row[j]:
                    acc += row[j] * tj
            total += si * acc
    return total


def combine(mats: Sequence[Mat], coeffs: Sequence[Fraction]) -> Mat:
    p = len(mats[0])
    out = [[Fraction(0)] * p for _ in range(p)]
    for M, c in zip(mats, coeffs):
        c = Fraction(c)
        if not c:
            continue
        for i in range(p):
            Mi, oi = M[i], out[i]
            for j in range(p):
                if Mi[j]:
                    oi[j] += c * Mi[j]
    return tuple(tuple(r) for r in out)


def frobenius(D: Mat, U: Mat) -> Fraction:
    """Trace inner product D . U."""
    return sum((a * b for rd, ru in zip(D, U) for a, b in zip(rd, ru)), Fraction(0))


# -- evaluations ---------------------------------------------------------

def eval_constraint(sys: CopSystem, x: Sequence) -> Mat:
    """A(x) = A0 + sum_m x_m A_m."""
    if len(x) != sys.n:
        raise ValueError(f"x has length {len(x)}, expected n = {sys.n}")
    return combine(sys.matrices, [Fraction(1)] + [Fraction(v) for v in x])


def eval_lifted(sys: CopSystem, z: Sequence) -> Mat:
    """B(z) = sum_{m=0..n} z_m A_m."""
    if len(z) != sys.n + 1:
        raise ValueError(f"z has length {len(z)}, expected n + 1 = {sys.n + 1}")
    return combine(sys.matrices, [Fraction(v) for v in z])


def lifted_a(sys: CopSystem, t: Sequence) -> tuple[Fraction, ...]:
    """a(t) = (t' A_m t)_{m=0..n}; t need not be normalised."""
    t = [Fraction(v) for v in t]
    return tuple(quad(M, t) for M in sys.matrices)


def lifted_pair(sys: CopSystem, s: Sequence, t: Sequence) -> tuple[Fraction, ...]:
    """(s' A_m t)_m, the bilinear version of :func:`lifted_a`."""
    s = [Fraction(v) for v in s]
    t = [Fraction(v) for v in t]
    return tuple(bilinear(M, s, t) for M in sys.matrices)


def lifted_b(sys: CopSystem, k: int, t: Sequence) -> tuple[Fraction, ...]:
    """b(k, t) = (e_k' A_m t)_m with 1-based ``k``."""
    if not 1 <= k <= sys.p:
        raise IndexError(f"k = {k} outside 1..{sys.p}")
    t = [Fraction(v) for v in t]
    return tuple(sum((M[k - 1][i] * ti for i, ti in enumerate(t) if ti), Fraction(0))
                 for M in sys.matrices)


def identity_a_decomposition_check(sys: CopSystem, t: Sequence) -> bool:
    """Self-test of a(t) = sum_{k: t_k > 0} t_k b(k, t)."""
    t = [Fraction(v) for v in t]
    acc = [Fraction(0)] * (sys.n + 1)
    for k, tk in enumerate(t, start=1):
        if tk > 0:
            for m, v in enumerate(lifted_b(sys, k, t)):
                acc[m] += tk * v
    return tuple(acc) == lifted_a(sys, t)


def affine_row(vec: Sequence[Fraction]) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Split a lifted vector v into (v0, (v1..vn)) so that (1,x).v = v0 + v'x."""
    return vec[0], tuple(vec[1:])


def lifted_value(vec: Sequence[Fraction], x: Sequence[Fraction]) -> Fraction:
    """(1, x') . vec."""
    return vec[0] + sum((v * xi for v, xi in zip(vec[1:], x)), Fraction(0))


# -- problem files -------------------------------------------------------

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")
_SCALED = re.compile(r"^\s*(?P<coef>[+-]?(\d+(/\d+)?)?)\s*\*?\s*(?P<name>[A-Za-z_]\w*)\s*$")


def parse_rational(value: Any, parameters: Optional[dict] = None) -> Fraction:
    """Integers, ``"num/den"`` strings, or ``"[coef*]name"`` referring to a parameter.

    Floats are refused on purpose: the whole pipeline is exact.
    """
    if isinstance(value, bool):
        raise ProblemFormatError(f"boolean {value!r} is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ProblemFormatError(f"floating-point entry {value!r}; write it as \"num/den\"")
    if isinstance(value, str):
        if _RATIONAL.match(value):
            try:
                return Fraction(value.replace(" ", ""))
            except ZeroDivisionError:
                raise ProblemFormatError(f"zero denominator in {value!r}") from None
        m = _SCALED.match(value)
        if m and parameters is not None and m.group("name") in parameters:
            coef = m.group("coef")
            if coef in ("", "+"):
                c = Fraction(1)
            elif coef == "-":
                c = Fraction(-1)
            else:
                c = Fraction(coef)
            return c * parameters[m.group("name")]
    raise ProblemFormatError(f"cannot read {value!r} as a rational")


def format_rational(v: Fraction) -> str | int:
    v = Fraction(v)
    if v.denominator == 1:
        return int(v)
    return f"{v.numerator}/{v.denominator}"


def system_from_dict(data: dict, overrides: Optional[dict] = None) -> CopSystem:
    if not isinstance(data, dict):
        raise ProblemFormatError("problem file must contain a JSON object")
    for key in ("n", "p", "matrices"):
        if key not in data:
            raise ProblemFormatError(f"missing key {key!r}")
    n, p = data["n"], data["p"]
    if not isinstance(n, int) or not isinstance(p, int) or isinstance(n, bool) or isinstance(p, bool):
        raise ProblemFormatError("n and p must be integers")
    if n < 1 or p < 2:
        raise ProblemFormatError(f"need n >= 1 and p >= 2, got n = {n}, p = {p}")
    raw_params = dict(data.get("parameters", {}))
    if overrides:
        unknown = set(overrides) - set(raw_params)
        if unknown:
            raise ProblemFormatError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        raw_params.update(overrides)
    params = {k: parse_rational(v) for k, v in raw_params.items()}
    mats_raw = data["matrices"]
    if not isinstance(mats_raw, list) or len(mats_raw) != n + 1:
        raise ProblemFormatError(f"expected n + 1 = {n + 1} matrices")
    mats = []
    for i, M in enumerate(mats_raw):
        if not isinstance(M, list) or len(M) != p or any(not isinstance(r, list) or len(r) != p for r in M):
            raise ProblemFormatError(f"matrix {i} is not {p}x{p}")
        try:
            mats.append(tuple(tuple(parse_rational(v, params) for v in row) for row in M))
        except ProblemFormatError as exc:
            raise ProblemFormatError(f"matrix {i}: {exc}") from None
    hint = None
    if "immobile_hint" in data:
        hint = _parse_hint(data["immobile_hint"], p, params)
    return CopSystem(tuple(mats), name=str(data.get("name", "")), parameters=params,
                     metadata=dict(data.get("metadata", {})), immobile_hint=hint)


def _parse_hint(raw, p, params):
    if not isinstance(raw, list):
        raise ProblemFormatError("immobile_hint must be a list of polytopes")
    pieces = []
    for poly in raw:
        if not isinstance(poly, list) or not poly:
            raise ProblemFormatError("each immobile_hint polytope must be a nonempty vertex list")
        verts = []
        for v in poly:
            if not isinstance(v, list) or len(v) != p:
                raise ProblemFormatError(f"hint vertex {v!r} must have {p} entries")
            t = tuple(parse_rational(x, params) for x in v)
            if any(x < 0 for x in t) or sum(t) != 1:
                raise ProblemFormatError(f"hint vertex {v!r} is not in the simplex")
            verts.append(t)
        pieces.append(tuple(verts))
    return tuple(pieces)


def fixture_path(name: str) -> Path:
    ref = resources.files("copduality") / "fixtures" / f"{name}.json"
    return Path(str(ref))


def load_problem(source, overrides: Optional[dict] = None) -> CopSystem:
    """Load a problem file; bundled fixtures can be named ``ex1`` .. ``ex3``."""
    if isinstance(source, dict):
        return system_from_dict(source, overrides)
    path = Path(source)
    if not path.exists() and str(source) in FIXTURES:
        path = fixture_path(str(source))
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFormatError(f"cannot read {source}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{source}: invalid JSON ({exc})") from None
    sys = system_from_dict(data, overrides)
    if not sys.name:
        sys = CopSystem(sys.matrices, name=path.stem, parameters=sys.parameters,
                        metadata=sys.metadata, immobile_hint=sys.immobile_hint)
    return sys


def system_to_dict(sys: CopSystem) -> dict:
    out = {
        "n": sys.n,
        "p": sys.p,
        "matrices": [[[format_rational(v) for v in row] for row in M] for M in sys.matrices],
    }
    if sys.name:
        out["name"] = sys.name
    if sys.parameters:
        out["parameters"] = {k: format_rational(v) for k, v in sorted(sys.parameters.items())}
    if sys.immobile_hint is not None:
        out["immobile_hint"] = [[[format_rational(v) for v in t] for t in poly] for poly in sys.immobile_hint]
    return out


def certified_dual_value(sys: CopSystem, cost: Sequence[Fraction]) -> Optional[Fraction]:
    """Hand-certified Val(D) carried as fixture metadata, if any."""
    for entry in sys.metadata.get("certified_dual_values", []):
        c = tuple(parse_rational(v, sys.parameters) for v in entry["cost"])
        if c == tuple(Fraction(v) for v in cost):
            return parse_rational(entry["value"], sys.parameters)
    return None
