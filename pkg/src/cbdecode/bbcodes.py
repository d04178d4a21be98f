"""Bivariate-bicycle CSS code construction.

A code is defined by integers (l, m) and two weight-3 polynomials A, B in the
commuting cyclic-shift operators x = S_l (x) I_m and y = I_l (x) S_m.  The
check matrices are hx = [A | B] and hz = [B^T | A^T]; logical operator bases
are completions of the stabilizer row spaces inside the opposite kernels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import yaml

from .gf2 import BinaryMatrix, kernel_basis_mod2, mat_vec_mod2, quotient_basis, rank_mod2

_MONOMIAL_RE = re.compile(r"^([xy])(?:\^(\d+))?$")


@dataclass(frozen=True)
class Monomial:
    """A power of x or y, e.g. x^3 or y (power 1)."""

    variable: str
    power: int

    def __post_init__(self):
        if self.variable not in ("x", "y"):
            raise ValueError(f"monomial variable must be x or y, got {self.variable!r}")
        if self.power < 0:
            raise ValueError("monomial power must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        m = _MONOMIAL_RE.match(text.strip())
        if m is None:
            raise ValueError(f"cannot parse monomial {text!r} (expected e.g. 'x^3' or 'y')")
        return cls(m.group(1), int(m.group(2)) if m.group(2) else 1)

    def reduced(self, l: int, m: int) -> "Monomial":
        mod = l if self.variable == "x" else m
        return Monomial(self.variable, self.power % mod)

    def __str__(self):
        return self.variable if self.power == 1 else f"{self.variable}^{self.power}"


@dataclass(frozen=True)
class BBCodeSpec:
    """(l, m) lattice sizes plus the three-term polynomials A and B.

    Terms must be pairwise distinct as written; exponents are reduced modulo
    l (for x) and m (for y) when the matrices are evaluated.
    """

    l: int
    m: int
    a_terms: tuple[Monomial, Monomial, Monomial]
    b_terms: tuple[Monomial, Monomial, Monomial]
    distance: int | None = None
    name: str = ""

    def __post_init__(self):
        if self.l < 1 or self.m < 1:
            raise ValueError("l and m must be positive")
        for label, terms in (("a_terms", self.a_terms), ("b_terms", self.b_terms)):
            if len(terms) != 3:
                raise ValueError(f"{label} must have exactly three monomials")
            if len(set(terms)) != 3:
                raise ValueError(f"duplicate monomials in {label}")

    @classmethod
    def from_strings(
        cls,
        l: int,
        m: int,
        a_terms: list[str] | tuple[str, ...],
        b_terms: list[str] | tuple[str, ...],
        distance: int | None = None,
        name: str = "",
    ) -> "BBCodeSpec":
        return cls(
            l,
            m,
            tuple(Monomial.parse(t) for t in a_terms),
            tuple(Monomial.parse(t) for t in b_terms),
            distance,
            name,
        )


@dataclass
class CSSCode:
    """Paired X/Z parity-check matrices and logical operator bases."""

    n: int
    k: int
    hx: BinaryMatrix
    hz: BinaryMatrix
    logical_x: list[np.ndarray] = field(default_factory=list)
    logical_z: list[np.ndarray] = field(default_factory=list)
    distance: int | None = None
    name: str = ""

    def validate(self) -> None:
        """Check the CSS invariants; raises AssertionError on violation."""
        hx, hz = self.hx.to_dense(), self.hz.to_dense()
        assert hx.shape[1] == hz.shape[1] == self.n
        assert not ((hx.astype(np.uint32) @ hz.T.astype(np.uint32)) & 1).any(), (
            "hx hz^T != 0 (mod 2)"
        )
        assert self.k == self.n - rank_mod2(self.hx) - rank_mod2(self.hz)
        assert len(self.logical_x) == len(self.logical_z) == self.k
        for v in self.logical_z:
            assert not mat_vec_mod2(self.hx, v).any(), "logical_z outside ker(hx)"
        for v in self.logical_x:
            assert not mat_vec_mod2(self.hz, v).any(), "logical_x outside ker(hz)"


def cyclic_shift(size: int) -> BinaryMatrix:
    """size x size permutation matrix with entry (i, (i+1) mod size)."""
    if size < 1:
        raise ValueError("cyclic shift size must be >= 1")
    return BinaryMatrix(size, size, ((i, (i + 1) % size) for i in range(size)))


def build_xy(l: int, m: int) -> tuple[BinaryMatrix, BinaryMatrix]:
    """The commuting lm x lm shift operators x and y."""
    if l < 1 or m < 1:
        raise ValueError("l and m must be >= 1")
    x = np.kron(cyclic_shift(l).to_dense(), np.eye(m, dtype=np.uint8))
    y = np.kron(np.eye(l, dtype=np.uint8), cyclic_shift(m).to_dense())
    return BinaryMatrix.from_dense(x), BinaryMatrix.from_dense(y)


def _term_matrix(term: Monomial, l: int, m: int) -> np.ndarray:
    t = term.reduced(l, m)
    if t.variable == "x":
        return np.kron(
            np.roll(np.eye(l, dtype=np.uint8), t.power, axis=1), np.eye(m, dtype=np.uint8)
        )
    return np.kron(
        np.eye(l, dtype=np.uint8), np.roll(np.eye(m, dtype=np.uint8), t.power, axis=1)
    )


def build_bb_code(spec: BBCodeSpec) -> CSSCode:
    """Construct the CSS code for a bivariate-bicycle spec.

    n = 2 l m, hx = [A | B], hz = [B^T | A^T] with A and B the mod-2 sums of
    the evaluated polynomial terms.  Logical bases are completion bases: the
    kernel of one check matrix quotiented by the row space of the other.
    """
    l, m = spec.l, spec.m
    a = np.zeros((l * m, l * m), dtype=np.uint8)
    b = np.zeros((l * m, l * m), dtype=np.uint8)
    for t in spec.a_terms:
        a ^= _term_matrix(t, l, m)
    for t in spec.b_terms:
        b ^= _term_matrix(t, l, m)
    hx = BinaryMatrix.from_dense(np.hstack([a, b]))
    hz = BinaryMatrix.from_dense(np.hstack([b.T, a.T]))
    n = 2 * l * m
    k = n - rank_mod2(hx) - rank_mod2(hz)
    hx_rows = [r for r in hx.to_dense()]
    hz_rows = [r for r in hz.to_dense()]
    logical_z = quotient_basis(hz_rows, kernel_basis_mod2(hx))
    logical_x = quotient_basis(hx_rows, kernel_basis_mod2(hz))
    if len(logical_z) != k or len(logical_x) != k:
        raise RuntimeError("logical basis size does not match k")
    return CSSCode(
        n=n,
        k=k,
        hx=hx,
        hz=hz,
        logical_x=logical_x,
        logical_z=logical_z,
        distance=spec.distance,
        name=spec.name or f"bb_l{l}_m{m}",
    )


def spec_from_dict(data: dict) -> BBCodeSpec:
    for key in ("l", "m", "a_terms", "b_terms"):
        if key not in data:
            raise ValueError(f"code spec missing key {key!r}")
    return BBCodeSpec.from_strings(
        int(data["l"]),
        int(data["m"]),
        list(data["a_terms"]),
        list(data["b_terms"]),
        distance=int(data["distance"]) if "distance" in data else None,
        name=str(data.get("name", "")),
    )


def load_code_spec(path: str) -> BBCodeSpec:
    """Load a code spec file: keys l, m, a_terms, b_terms, optional distance."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: code spec must be a mapping")
    return spec_from_dict(data)


# The three codes used throughout the experiments: [[72,12,6]], [[108,8,10]]
# and [[144,12,12]], all sharing A = x^3 + y + y^2 and B = y^3 + x + x^2.
STANDARD_CODES: dict[str, BBCodeSpec] = {
    "bb72": BBCodeSpec.from_strings(
        6, 6, ["x^3", "y", "y^2"], ["y^3", "x", "x^2"], distance=6, name="bb72"
    ),
    "bb108": BBCodeSpec.from_strings(
        9, 6, ["x^3", "y", "y^2"], ["y^3", "x", "x^2"], distance=10, name="bb108"
    ),
    "bb144": BBCodeSpec.from_strings(
        12, 6, ["x^3", "y", "y^2"], ["y^3", "x", "x^2"], distance=12, name="bb144"
    ),
}
