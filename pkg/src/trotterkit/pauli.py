"""Sparse symbolic algebra over N-qubit Pauli strings.

Operators are stored as weighted Pauli strings with a site -> letter map, so
a local term costs O(weight) memory regardless of the system size.  This is
the exact layer of the toolkit: products, nested commutators, coefficient
norms, and the two spin-chain model builders are all evaluated symbolically,
with dense matrices used only for small-support spectral norms.

Conventions
-----------
* Qubit ``q`` maps to bit ``q`` of a computational-basis index (little
  endian), so ``|0...01>`` is index 1 and acts on qubit 0.
* Pauli strings are Hermitian; a term is Hermitian iff its coefficient is
  real.
* Canonical sums merge duplicate strings and drop coefficients below
  ``COEFF_TOL`` (floating-point cancellation dust from deep commutators).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    ModelError,
    ResourceLimitError,
)

COEFF_TOL = 1e-14
DENSE_QUBIT_CAP = 12

LETTERS = ("X", "Y", "Z")

# Single-qubit products P*Q -> (letter, k) meaning i**k * letter ("I" for identity).
_PRODUCT_TABLE = {
    ("X", "X"): ("I", 0), ("Y", "Y"): ("I", 0), ("Z", "Z"): ("I", 0),
    ("X", "Y"): ("Z", 1), ("Y", "X"): ("Z", 3),
    ("Y", "Z"): ("X", 1), ("Z", "Y"): ("X", 3),
    ("Z", "X"): ("Y", 1), ("X", "Z"): ("Y", 3),
}

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string.

    Parameters
    ----------
    coefficient : complex
        Weight of the string; canonical storage never keeps exact zeros.
    letters : mapping int -> {"X","Y","Z"}
        Non-identity sites.  An empty map is the identity string.
    n_qubits : int
        Total register size; every site index must lie below it.
    """

    coefficient: complex
    letters: tuple[tuple[int, str], ...]
    n_qubits: int

    def __post_init__(self):
        object.__setattr__(self, "letters", _normalize_letters(self.letters))
        for site, letter in self.letters:
            if not 0 <= site < self.n_qubits:
                raise DimensionMismatchError(
                    f"site {site} outside register of {self.n_qubits} qubits"
                )
            if letter not in LETTERS:
                raise ValueError(f"invalid Pauli letter {letter!r}")

    @property
    def weight(self) -> int:
        """Number of non-identity sites."""
        return len(self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(site for site, _ in self.letters)

    def letter_at(self, site: int) -> str:
        for s, letter in self.letters:
            if s == site:
                return letter
        return "I"

    def with_coefficient(self, c: complex) -> "PauliTerm":
        return PauliTerm(c, self.letters, self.n_qubits)

    def __repr__(self):
        body = " ".join(f"{s}:{l}" for s, l in self.letters) or "I"
        return f"PauliTerm({self.coefficient:+.6g}, {body})"


def _normalize_letters(letters) -> tuple[tuple[int, str], ...]:
    if isinstance(letters, Mapping):
        items = letters.items()
    else:
        items = letters
    return tuple(sorted((int(s), str(l)) for s, l in items))


def _string_product(a: tuple, b: tuple) -> tuple[tuple, int]:
    """Multiply two letter patterns; return (pattern, k) with phase i**k."""
    out = dict(a)
    k = 0
    for site, letter in b:
        cur = out.get(site)
        if cur is None:
            out[site] = letter
            continue
        new, kk = _PRODUCT_TABLE[(cur, letter)]
        k = (k + kk) % 4
        if new == "I":
            del out[site]
        else:
            out[site] = new
    return tuple(sorted(out.items())), k


def _strings_commute(a: tuple, b: tuple) -> bool:
    """Pauli strings commute iff they differ on an even number of shared sites."""
    bmap = dict(b)
    clashes = 0
    for site, letter in a:
        other = bmap.get(site)
        if other is not None and other != letter:
            clashes += 1
    return clashes % 2 == 0


class PauliSum:
    """A canonical sum of Pauli strings on a fixed register.

    Terms with identical letter patterns are merged on insertion and
    coefficients with magnitude below ``COEFF_TOL`` are dropped, so two sums
    representing the same operator compare structurally equal.

    Instances are treated as immutable once constructed; all algebraic
    operations return new sums.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Iterable[PauliTerm] = ()):
        if n_qubits < 1:
            raise DimensionMismatchError("n_qubits must be positive")
        self.n_qubits = int(n_qubits)
        acc: dict[tuple, complex] = {}
        for t in terms:
            if t.n_qubits != self.n_qubits:
                raise DimensionMismatchError(
                    f"term on {t.n_qubits} qubits added to {self.n_qubits}-qubit sum"
                )
            acc[t.letters] = acc.get(t.letters, 0.0) + complex(t.coefficient)
        self._terms = {
            pat: c for pat, c in acc.items() if abs(c) > COEFF_TOL
        }

    # ---- construction helpers ----

    @classmethod
    def from_label(cls, n_qubits: int, coefficient: complex,
                   letters: Mapping[int, str] | Iterable[tuple[int, str]]) -> "PauliSum":
        return cls(n_qubits, [PauliTerm(coefficient, _normalize_letters(letters), n_qubits)])

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [PauliTerm(coefficient, (), n_qubits)])

    # ---- container protocol ----

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        # canonical order: leftmost support site, then weight, then pattern
        def key(pat):
            return (pat[0][0] if pat else -1, len(pat), pat)
        for pat in sorted(self._terms, key=key):
            yield PauliTerm(self._terms[pat], pat, self.n_qubits)

    def coefficient_of(self, letters) -> complex:
        return self._terms.get(_normalize_letters(letters), 0.0)

    @property
    def support(self) -> tuple[int, ...]:
        sites = set()
        for pat in self._terms:
            sites.update(s for s, _ in pat)
        return tuple(sorted(sites))

    @property
    def identity_coefficient(self) -> complex:
        return self._terms.get((), 0.0)

    def max_weight(self) -> int:
        return max((len(pat) for pat in self._terms), default=0)

    # ---- algebra ----

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check(other)
        return PauliSum(self.n_qubits, list(self) + list(other))

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (other * -1.0)

    def __mul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(
            self.n_qubits,
            [PauliTerm(c * scalar, pat, self.n_qubits) for pat, c in self._terms.items()],
        )

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, fully expanded and canonicalized."""
        self._check(other)
        out: dict[tuple, complex] = {}
        for pat_a, ca in self._terms.items():
            for pat_b, cb in other._terms.items():
                pat, k = _string_product(pat_a, pat_b)
                out[pat] = out.get(pat, 0.0) + ca * cb * _I_POWERS[k]
        return _from_dict(self.n_qubits, out)

    def adjoint(self) -> "PauliSum":
        return PauliSum(
            self.n_qubits,
            [PauliTerm(c.conjugate(), pat, self.n_qubits) for pat, c in self._terms.items()],
        )

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def _check(self, other: "PauliSum"):
        if not isinstance(other, PauliSum):
            raise TypeError("expected a PauliSum")
        if other.n_qubits != self.n_qubits:
            raise DimensionMismatchError(
                f"{self.n_qubits}-qubit sum combined with {other.n_qubits}-qubit sum"
            )

    # ---- norms ----

    def one_norm(self) -> float:
        """Sum of coefficient magnitudes; a spectral-norm upper bound."""
        return float(sum(abs(c) for c in self._terms.values()))

    def frobenius_norm(self) -> float:
        """Normalized Frobenius norm sqrt(tr(M M^dag)/2^N).

        Distinct Pauli strings are trace-orthogonal, so this equals the root
        of the coefficient-squared sum exactly.
        """
        return math.sqrt(sum(abs(c) ** 2 for c in self._terms.values()))

    def spectral_norm_dense(self, cap: int = DENSE_QUBIT_CAP) -> float:
        """Largest singular value of the dense matrix on the support."""
        sites = self.support
        if not sites:
            return abs(self.identity_coefficient)
        if len(sites) > cap:
            raise ResourceLimitError(
                f"support of {len(sites)} qubits exceeds dense cap {cap}"
            )
        m = self.dense_on_support()
        return float(np.linalg.svd(m, compute_uv=False)[0])

    # ---- dense realizations ----

    def dense(self, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
        """Full 2^N x 2^N matrix (little-endian basis)."""
        if self.n_qubits > cap:
            raise ResourceLimitError(
                f"{self.n_qubits} qubits exceeds dense cap {cap}"
            )
        return _dense_from_terms(self._terms, self.n_qubits)

    def dense_on_support(self, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
        """Dense matrix of the operator restricted to its support qubits."""
        sites = self.support
        if len(sites) > cap:
            raise ResourceLimitError(
                f"support of {len(sites)} qubits exceeds dense cap {cap}"
            )
        relabel = {s: i for i, s in enumerate(sites)}
        reduced = {
            tuple(sorted((relabel[s], l) for s, l in pat)): c
            for pat, c in self._terms.items()
        }
        return _dense_from_terms(reduced, max(len(sites), 1))

    # ---- serialization ----

    def to_text(self) -> str:
        """One term per line: ``coeff_re coeff_im site:letter ...``."""
        lines = []
        for t in self:
            parts = [f"{t.coefficient.real!r}", f"{t.coefficient.imag!r}"]
            parts += [f"{s}:{l}" for s, l in t.letters]
            lines.append(" ".join(parts))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n_qubits: int) -> "PauliSum":
        terms = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            c = complex(float(fields[0]), float(fields[1]))
            letters = []
            for tok in fields[2:]:
                site, letter = tok.split(":")
                letters.append((int(site), letter))
            terms.append(PauliTerm(c, tuple(letters), n_qubits))
        return cls(n_qubits, terms)

    def __repr__(self):
        if not self._terms:
            return f"PauliSum({self.n_qubits} qubits, 0)"
        body = " + ".join(repr(t) for t in list(self)[:4])
        more = f" ... [{len(self)} terms]" if len(self) > 4 else ""
        return f"PauliSum({self.n_qubits} qubits: {body}{more})"

    def allclose(self, other: "PauliSum", tol: float = 1e-12) -> bool:
        self._check(other)
        pats = set(self._terms) | set(other._terms)
        return all(
            abs(self._terms.get(p, 0.0) - other._terms.get(p, 0.0)) <= tol
            for p in pats
        )


def _from_dict(n_qubits: int, data: dict[tuple, complex]) -> PauliSum:
    out = PauliSum.__new__(PauliSum)
    out.n_qubits = n_qubits
    out._terms = {pat: c for pat, c in data.items() if abs(c) > COEFF_TOL}
    return out


def _dense_from_terms(terms: dict[tuple, complex], n_qubits: int) -> np.ndarray:
    """Assemble a dense matrix column-by-column from permutation+phase action."""
    dim = 1 << n_qubits
    m = np.zeros((dim, dim), dtype=np.complex128)
    idx = np.arange(dim)
    for pat, c in terms.items():
        flip = 0
        zy = 0
        n_y = 0
        for site, letter in pat:
            if letter in ("X", "Y"):
                flip |= 1 << site
            if letter in ("Z", "Y"):
                zy |= 1 << site
            if letter == "Y":
                n_y += 1
        phase = _I_POWERS[n_y % 4] * _parity_signs(idx, zy)
        m[idx ^ flip, idx] += c * phase
    return m


def _parity_signs(idx: np.ndarray, mask: int) -> np.ndarray:
    """(-1)**popcount(idx & mask), vectorized."""
    v = idx & mask
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return 1.0 - 2.0 * (v & 1)


# ---------------------------------------------------------------------------
# Commutators
# ---------------------------------------------------------------------------

def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """Exact commutator [a, b] = ab - ba as a canonical PauliSum.

    Commuting string pairs contribute nothing; anticommuting pairs contribute
    ``2 * ca * cb * i^k * (product string)``.  Pairs with disjoint supports are
    skipped via a site index, so lattice-local sums commute in near-linear
    time.
    """
    a._check(b)
    by_site: dict[int, list[tuple]] = {}
    identity_free_b = []
    for pat_b in b._terms:
        if not pat_b:
            continue  # identity commutes with everything
        identity_free_b.append(pat_b)
        for site, _ in pat_b:
            by_site.setdefault(site, []).append(pat_b)

    out: dict[tuple, complex] = {}
    for pat_a, ca in a._terms.items():
        if not pat_a:
            continue
        seen = set()
        for site, _ in pat_a:
            for pat_b in by_site.get(site, ()):
                if pat_b in seen:
                    continue
                seen.add(pat_b)
                if _strings_commute(pat_a, pat_b):
                    continue
                pat, k = _string_product(pat_a, pat_b)
                out[pat] = out.get(pat, 0.0) + 2.0 * ca * b._terms[pat_b] * _I_POWERS[k]
    return _from_dict(a.n_qubits, out)


def nested_commutator_norm_sum(split: "HamiltonianSplit", depth: int,
                               tuple_cap: int = 100_000) -> float:
    """Coefficient-1-norm upper bound on the nested-commutator sum of a split.

    Sums ``one_norm([H_l1, [H_l2, ..., [H_l{depth-1}, H_l{depth}]]])`` over all
    index tuples; the 1-norm dominates each spectral norm so the result upper
    bounds the corresponding spectral sum.
    """
    if depth < 2:
        raise ValueError("depth must be at least 2")
    parts = split.parts
    n_tuples = len(parts) ** depth
    if n_tuples > tuple_cap:
        raise ResourceLimitError(
            f"{n_tuples} index tuples exceed cap {tuple_cap}"
        )

    # Build right-to-left: level k holds the nested commutators of depth k.
    level = {(i,): p for i, p in enumerate(parts)}
    for _ in range(depth - 1):
        nxt = {}
        for tail, op in level.items():
            for i, p in enumerate(parts):
                nxt[(i,) + tail] = commutator(p, op)
        level = nxt
    return float(sum(op.one_norm() for op in level.values()))


# ---------------------------------------------------------------------------
# Model builders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HamiltonianSplit:
    """An ordered split H = H_1 + ... + H_L for product-formula stepping.

    ``within_part_commuting[l]`` records whether every pair of strings in part
    ``l`` commutes (verified at construction), which decides whether the stage
    exponential may be taken term by term.
    """

    parts: tuple[PauliSum, ...]
    within_part_commuting: tuple[bool, ...] = field(default=None)

    def __post_init__(self):
        if not self.parts:
            raise ModelError("split needs at least one part")
        n = self.parts[0].n_qubits
        if any(p.n_qubits != n for p in self.parts):
            raise DimensionMismatchError("split parts act on different registers")
        if self.within_part_commuting is None:
            flags = tuple(part_commutes(p) for p in self.parts)
            object.__setattr__(self, "within_part_commuting", flags)

    @property
    def n_qubits(self) -> int:
        return self.parts[0].n_qubits

    @property
    def n_parts(self) -> int:
        return len(self.parts)

    def hamiltonian(self) -> PauliSum:
        total = self.parts[0]
        for p in self.parts[1:]:
            total = total + p
        return total


def part_commutes(part: PauliSum) -> bool:
    """True iff every pair of strings in the sum commutes."""
    pats = [p for p in part._terms if p]
    for i, a in enumerate(pats):
        for b in pats[i + 1:]:
            if not _strings_commute(a, b):
                return False
    return True


def build_qimf(n: int, hx: float, hy: float, j: float) -> HamiltonianSplit:
    """Mixed-field 1D Ising chain split into an all-X part and an all-Y part.

    Part A carries the transverse X fields plus the XX couplings; part B the Y
    fields.  Both parts are internally commuting, so each stage exponential of
    a product formula factorizes exactly over terms.
    """
    if n < 2:
        raise ModelError("qimf chain needs at least 2 qubits")
    a_terms = []
    b_terms = []
    for q in range(n):
        a_terms.append(PauliTerm(hx, ((q, "X"),), n))
        b_terms.append(PauliTerm(hy, ((q, "Y"),), n))
    for q in range(n - 1):
        a_terms.append(PauliTerm(j, ((q, "X"), (q + 1, "X")), n))
    return HamiltonianSplit((PauliSum(n, a_terms), PauliSum(n, b_terms)))


def build_heisenberg(n: int, fields: Sequence[float]) -> HamiltonianSplit:
    """Random-field Heisenberg chain split into even-bond and odd-bond parts.

    Bonds starting on even sites (0-1, 2-3, ...) and the fields on even sites
    form part A; bonds starting on odd sites and the odd-site fields form part
    B.  The two-qubit blocks of each part act on disjoint qubit pairs, but a
    field term anticommutes with its own bond's XX/YY terms, so a part with
    nonzero fields is not term-wise commuting (the stepper handles these parts
    via exact per-block exponentials).
    """
    if n < 4 or n % 2:
        raise ModelError("heisenberg split needs an even chain of at least 4 sites")
    if len(fields) != n:
        raise ModelError(f"need {n} field values, got {len(fields)}")
    a_terms = []
    b_terms = []
    for q in range(n - 1):
        dest = a_terms if q % 2 == 0 else b_terms
        for letter in LETTERS:
            dest.append(PauliTerm(1.0, ((q, letter), (q + 1, letter)), n))
    for q in range(n):
        dest = a_terms if q % 2 == 0 else b_terms
        dest.append(PauliTerm(float(fields[q]), ((q, "Z"),), n))
    return HamiltonianSplit((PauliSum(n, a_terms), PauliSum(n, b_terms)))


# Module-level conveniences mirroring the PauliSum methods.

def one_norm(s: PauliSum) -> float:
    return s.one_norm()


def frobenius_norm(s: PauliSum) -> float:
    return s.frobenius_norm()


def spectral_norm_dense(s: PauliSum, cap: int = DENSE_QUBIT_CAP) -> float:
    return s.spectral_norm_dense(cap)
