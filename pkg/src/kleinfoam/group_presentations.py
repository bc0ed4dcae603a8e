"""Topological types of Klein surfaces, their group presentations, and
disk automorphisms used as images of the generators.

A type is ``(sign, g, m, r, k, (b_1..b_k))``: orientability, genus (or
crosscap number), holes, interior punctures, boundary ovals and the number
of punctures on each oval.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import FoamError

TOL = 1e-9


@dataclass(frozen=True)
class TopType:
    sign: str
    g: int
    m: int
    r: int
    k: int
    b: tuple[int, ...] = ()

    def __post_init__(self):
        if self.sign not in "+-" or len(self.sign) != 1:
            raise FoamError("E_PARSE", f"sign must be + or -, got {self.sign!r}")
        if min(self.g, self.m, self.r, self.k, *self.b, 0) < 0:
            raise FoamError("E_PARSE", "type entries must be non-negative")
        if len(self.b) != self.k:
            raise FoamError("E_PARSE", f"{self.k} ovals but {len(self.b)} puncture counts")
        if self.sign == "-" and self.g < 1:
            raise FoamError("E_PARSE", "non-orientable types need g >= 1")

    @classmethod
    def parse(cls, text) -> "TopType":
        if isinstance(text, TopType):
            return text
        if isinstance(text, (tuple, list)):
            sign, g, m, r, k, *rest = text
            b = tuple(rest[0]) if rest and isinstance(rest[0], (tuple, list)) else tuple(rest)
            return cls(sign, int(g), int(m), int(r), int(k), tuple(int(x) for x in b))
        parts = [p.strip() for p in re.sub(r"[()\s]", "", str(text)).split(",") if p.strip()]
        if len(parts) < 5:
            raise FoamError("E_PARSE", f"type needs at least 5 entries: {text!r}")
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise FoamError("E_PARSE", f"bad type {text!r}") from None
        return cls(parts[0], nums[0], nums[1], nums[2], nums[3], tuple(nums[4:]))

    def __str__(self) -> str:
        return ",".join([self.sign] + [str(x) for x in (self.g, self.m, self.r, self.k, *self.b)])

    def as_tuple(self) -> tuple:
        return (self.sign, self.g, self.m, self.r, self.k, self.b)


# ---------------------------------------------------------------- presentations

Word = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Generator:
    name: str
    sort: str  # a, b, d, h, x, e, c
    oval: int = 0  # 1-based oval index for e and c generators
    index: int = 0  # 1-based position within its sort (within the oval for c)

    @property
    def w(self) -> int:
        """Orientation character: 1 on orientation-reversing generators."""
        return 1 if self.sort in ("c", "d") else 0


@dataclass(frozen=True)
class Presentation:
    type: TopType
    generators: tuple[Generator, ...]
    relators: tuple[Word, ...]

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def generator(self, name: str) -> Generator:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)

    def character(self) -> dict[str, int]:
        return {g.name: g.w for g in self.generators}

    def reflections(self) -> list[Generator]:
        return [g for g in self.generators if g.sort == "c"]

    def to_doc(self) -> dict:
        return {"format": 1, "type": str(self.type),
                "generators": [{"name": g.name, "sort": g.sort, "w": g.w} for g in self.generators],
                "relators": [format_word(r) for r in self.relators]}

    @classmethod
    def from_doc(cls, doc) -> "Presentation":
        try:
            t = TopType.parse(doc["type"])
            names = [g["name"] for g in doc["generators"]]
            rels = tuple(parse_word(r, names) for r in doc["relators"])
        except (KeyError, TypeError) as exc:
            raise FoamError("E_PARSE", f"presentation document: {exc}") from None
        p = presentation_of_type(t)
        if p.names != names or p.relators != rels:
            raise FoamError("E_PARSE", "document does not match the presentation of its type")
        return p


def format_word(w: Word) -> str:
    if not w:
        return "1"
    out = []
    i = 0
    while i < len(w):
        name, e = w[i]
        j = i
        while j + 1 < len(w) and w[j + 1] == (name, e):
            j += 1
        n = (j - i + 1) * e
        out.append(name if n == 1 else f"{name}^{n}")
        i = j + 1
    return " ".join(out)


def parse_word(text: str, names) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    out = []
    for tok in text.split():
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?", tok)
        if not m or m.group(1) not in names:
            raise FoamError("E_PARSE", f"bad word token {tok!r}")
        n = int(m.group(2) or 1)
        if n == 0:
            raise FoamError("E_PARSE", f"zero exponent in {tok!r}")
        out.extend([(m.group(1), 1 if n > 0 else -1)] * abs(n))
    return tuple(out)


def presentation_of_type(t: TopType) -> Presentation:
    """Generators in the order (a,b pairs | d), h, x, e, c; relators c^2 then the long relator."""
    t = TopType.parse(t)
    gens: list[Generator] = []
    if t.sign == "+":
        for j in range(1, t.g + 1):
            gens += [Generator(f"a{j}", "a", index=j), Generator(f"b{j}", "b", index=j)]
    else:
        gens += [Generator(f"d{j}", "d", index=j) for j in range(1, t.g + 1)]
    hs = [Generator(f"h{j}", "h", index=j) for j in range(1, t.m + 1)]
    xs = [Generator(f"x{j}", "x", index=j) for j in range(1, t.r + 1)]
    es = [Generator(f"e{i}", "e", oval=i, index=i) for i in range(1, t.k + 1)]
    cs = [Generator(f"c{i}_{j}", "c", oval=i, index=j) for i in range(1, t.k + 1) for j in range(1, t.b[i - 1] + 1)]
    gens += hs + xs + es + cs
    rels: list[Word] = [((c.name, 1), (c.name, 1)) for c in cs]
    long: list[tuple[str, int]] = []
    if t.sign == "+":
        for j in range(1, t.g + 1):
            a, b = f"a{j}", f"b{j}"
            long += [(a, 1), (b, 1), (a, -1), (b, -1)]
        long += [(x.name, 1) for x in xs] + [(h.name, 1) for h in hs]
    else:
        for j in range(1, t.g + 1):
            long += [(f"d{j}", 1), (f"d{j}", 1)]
        long += [(h.name, 1) for h in hs] + [(x.name, 1) for x in xs]
    long += [(e.name, 1) for e in es]
    rels.append(tuple(long))
    return Presentation(t, tuple(gens), tuple(rels))


def euler_char_of_type(t: TopType) -> Fraction:
    """Euler characteristic with each boundary puncture counted as half a point.

    Counting a boundary puncture as -1/2 (half of the cusp it becomes in the
    double) makes the value multiplicative under finite covers.
    """
    t = TopType.parse(t)
    base = 2 - 2 * t.g if t.sign == "+" else 2 - t.g
    return Fraction(base - t.m - t.k - t.r) - Fraction(sum(t.b), 2)


def teich_dimension(t: TopType) -> int:
    t = TopType.parse(t)
    if euler_char_of_type(t) >= 0:
        raise FoamError("E_NON_HYPERBOLIC", f"type {t} has non-negative Euler characteristic")
    gpart = 6 * t.g if t.sign == "+" else 3 * t.g
    return gpart + 3 * t.m + 3 * t.k + 2 * t.r + sum(t.b) - 6


# ---------------------------------------------------------------- automorphisms

@dataclass(frozen=True)
class DiskAutomorphism:
    """``z -> (a z + b) / (conj(b) z + conj(a))``, applied to ``conj(z)`` when ``anti``."""

    a: complex
    b: complex
    anti: bool = False

    def __post_init__(self):
        det = abs(self.a) ** 2 - abs(self.b) ** 2
        if not (math.isfinite(det) and abs(det - 1) <= TOL * max(1.0, abs(self.a) ** 2)):
            raise FoamError("E_BAD_MATRIX", f"|a|^2-|b|^2 = {det!r}, expected 1")

    @classmethod
    def identity(cls) -> "DiskAutomorphism":
        return cls(1 + 0j, 0j)

    @property
    def matrix(self) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
        return ((self.a, self.b), (self.b.conjugate(), self.a.conjugate()))

    def __call__(self, z: complex) -> complex:
        if self.anti:
            z = z.conjugate()
        return (self.a * z + self.b) / (self.b.conjugate() * z + self.a.conjugate())

    def compose(self, other: "DiskAutomorphism") -> "DiskAutomorphism":
        """``self o other``."""
        a2, b2 = (other.a.conjugate(), other.b.conjugate()) if self.anti else (other.a, other.b)
        a = self.a * a2 + self.b * b2.conjugate()
        b = self.a * b2 + self.b * a2.conjugate()
        return DiskAutomorphism(a, b, self.anti != other.anti)

    def inverse(self) -> "DiskAutomorphism":
        a, b = self.a.conjugate(), -self.b
        if self.anti:
            a, b = a.conjugate(), b.conjugate()
        return DiskAutomorphism(a, b, self.anti)

    def is_identity(self, tol: float = TOL) -> bool:
        """Identity up to the sign of the matrix."""
        if self.anti:
            return False
        scale = max(1.0, abs(self.a))
        return abs(self.b) <= tol * scale and min(abs(self.a - 1), abs(self.a + 1)) <= tol * scale

    @property
    def trace(self) -> float:
        return 2 * self.a.real

    @classmethod
    def from_sl2r(cls, m, anti: bool = False) -> "DiskAutomorphism":
        """Transport a real 2x2 matrix of determinant 1 from the upper half plane.

        With ``anti`` the half-plane map is ``z -> m(-conj z)``.
        """
        (p, q), (r, s) = m
        # Cayley C = [[1, -i], [1, i]]; the disk matrix is C m C^-1, and the
        # half-plane reflection z -> -conj z becomes z -> conj z in the disk
        a = ((p + s) + 1j * (q - r)) / 2
        b = ((p - s) - 1j * (q + r)) / 2
        return cls(complex(a), complex(b), anti)

    def to_doc(self) -> dict:
        return {"a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag], "anti": self.anti}

    @classmethod
    def from_doc(cls, doc) -> "DiskAutomorphism":
        try:
            a, b = complex(*doc["a"]), complex(*doc["b"])
            return cls(a, b, bool(doc.get("anti", False)))
        except (KeyError, TypeError, ValueError) as exc:
            raise FoamError("E_BAD_MATRIX", f"automorphism document: {exc}") from None


def rotation(theta: float) -> DiskAutomorphism:
    return DiskAutomorphism(cmath.exp(0.5j * theta), 0j)


def classify_automorphism(A: DiskAutomorphism, tol: float = TOL) -> str:
    if not isinstance(A, DiskAutomorphism):
        raise FoamError("E_BAD_MATRIX", "not a disk automorphism")
    if A.anti:
        return "reflection" if A.compose(A).is_identity(tol) else "glide"
    if A.is_identity(tol):
        return "identity"
    tr = abs(A.trace)
    if abs(tr - 2) <= tol * max(1.0, tr):
        return "parabolic"
    return "elliptic" if tr < 2 else "hyperbolic"


def evaluate_word(word: Word, assignment: dict) -> DiskAutomorphism:
    out = DiskAutomorphism.identity()
    for name, e in word:
        g = assignment[name]
        out = out.compose(g if e > 0 else g.inverse())
    return out


@dataclass(frozen=True)
class AdmissibilityReport:
    violations: tuple[str, ...]
    unchecked: tuple[str, ...] = ("discreteness", "invariant curves")

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_doc(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations), "unchecked": list(self.unchecked)}


def check_admissible_types(t: TopType, assignment: dict, tol: float = TOL) -> AdmissibilityReport:
    """Generator-type conditions on images of the generators.

    ``e_i`` is required to be hyperbolic only on ovals without punctures;
    with punctures it may be anything (even trivial) as long as the relators
    hold.
    """
    pres = presentation_of_type(t)
    missing = [n for n in pres.names if n not in assignment]
    if missing:
        raise FoamError("E_MISSING_GENERATOR", f"no image for {', '.join(missing)}")
    for n in pres.names:
        if not isinstance(assignment[n], DiskAutomorphism):
            raise FoamError("E_BAD_MATRIX", f"image of {n} is not a disk automorphism")
    out = []
    for g in pres.generators:
        if assignment[g.name].anti != bool(g.w):
            kind = "antiholomorphic" if g.w else "holomorphic"
            out.append(f"{g.name} not {kind}")
    for rel in pres.relators:
        if not evaluate_word(rel, assignment).is_identity(max(tol, 1e-9)):
            out.append(f"relator {format_word(rel)} is not the identity")
    tb = pres.type.b
    for g in pres.generators:
        A = assignment[g.name]
        if g.sort == "x" and classify_automorphism(A, tol) != "parabolic":
            out.append(f"{g.name} not parabolic")
        elif g.sort in ("a", "b", "h") and classify_automorphism(A, tol) != "hyperbolic":
            out.append(f"{g.name} not hyperbolic")
        elif g.sort == "e" and tb[g.oval - 1] == 0 and classify_automorphism(A, tol) != "hyperbolic":
            out.append(f"{g.name} not hyperbolic")
        elif g.sort == "d" and A.anti and classify_automorphism(A.compose(A), tol) != "hyperbolic":
            out.append(f"{g.name}^2 not hyperbolic")
        elif g.sort == "c" and classify_automorphism(A, tol) != "reflection":
            out.append(f"{g.name} not a reflection")
    return AdmissibilityReport(tuple(out))
