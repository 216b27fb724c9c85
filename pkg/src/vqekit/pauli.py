"""Pauli strings and real-weighted Pauli sums.

A string over {I, X, Y, Z} is stored as two bitmasks (one bit per qubit for
the X part and the Z part), so products and commutation checks are a few
word operations instead of a per-letter scan.  Letter conventions:

* ``letters[j]`` acts on qubit ``n - 1 - j``: the leftmost letter is the
  highest-numbered qubit, matching kets written as ``|b_{n-1} ... b_0>``.
* Basis index bit ``q`` holds the state of qubit ``q``.

Encoding per site: I=(x0,z0), X=(1,0), Y=(1,1), Z=(0,1), with the phase
convention P(x,z) = i^{x.z} X^x Z^z so that P(1,1) = Y exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError, ValidationError

__all__ = [
    "ATOL",
    "PauliString",
    "PauliTerm",
    "PauliSum",
    "multiply",
    "commutes",
]

# Coefficients at or below this magnitude are treated as zero when simplifying.
ATOL = 1e-12

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}

_SINGLE_QUBIT_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASES = (1.0 + 0j, 1j, -1.0 + 0j, -1j)  # i**k for k = 0..3


class PauliString:
    """An n-qubit Pauli operator with unit coefficient."""

    __slots__ = ("n_qubits", "x_mask", "z_mask")

    def __init__(self, letters: str):
        if not letters or any(c not in _LETTER_TO_BITS for c in letters):
            raise ValidationError(f"invalid Pauli letters: {letters!r}")
        n = len(letters)
        x = z = 0
        for j, c in enumerate(letters):
            xb, zb = _LETTER_TO_BITS[c]
            q = n - 1 - j
            x |= xb << q
            z |= zb << q
        self.n_qubits = n
        self.x_mask = x
        self.z_mask = z

    @classmethod
    def from_masks(cls, n_qubits: int, x_mask: int, z_mask: int) -> "PauliString":
        if n_qubits < 1:
            raise ValidationError("need at least one qubit")
        limit = 1 << n_qubits
        if not (0 <= x_mask < limit and 0 <= z_mask < limit):
            raise ValidationError("mask exceeds qubit count")
        obj = cls.__new__(cls)
        obj.n_qubits = n_qubits
        obj.x_mask = x_mask
        obj.z_mask = z_mask
        return obj

    @classmethod
    def from_ops(cls, n_qubits: int, ops: dict[int, str]) -> "PauliString":
        """Build from {qubit index: letter}; unspecified qubits are identity."""
        x = z = 0
        for q, c in ops.items():
            if not 0 <= q < n_qubits:
                raise ValidationError(f"qubit {q} out of range for n={n_qubits}")
            xb, zb = _LETTER_TO_BITS[c]
            x |= xb << q
            z |= zb << q
        return cls.from_masks(n_qubits, x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls.from_masks(n_qubits, 0, 0)

    @property
    def letters(self) -> str:
        out = []
        for j in range(self.n_qubits):
            q = self.n_qubits - 1 - j
            out.append(_BITS_TO_LETTER[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)])
        return "".join(out)

    @property
    def weight(self) -> int:
        """Number of non-identity sites."""
        return (self.x_mask | self.z_mask).bit_count()

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def commutes(self, other: "PauliString") -> bool:
        return commutes(self, other)

    def to_matrix(self, max_qubits: int = 12) -> np.ndarray:
        if self.n_qubits > max_qubits:
            raise CapacityError(
                f"dense matrix for {self.n_qubits} qubits exceeds limit {max_qubits}"
            )
        m = np.eye(1, dtype=complex)
        for c in self.letters:
            m = np.kron(m, _SINGLE_QUBIT_MATRICES[c])
        return m

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliString)
            and self.n_qubits == other.n_qubits
            and self.x_mask == other.x_mask
            and self.z_mask == other.z_mask
        )

    def __hash__(self) -> int:
        return hash((self.n_qubits, self.x_mask, self.z_mask))

    def __repr__(self) -> str:
        return f"PauliString({self.letters!r})"


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product a.b as (phase, string) with phase in {1, i, -1, -i}."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit mismatch: {a.n_qubits} vs {b.n_qubits}")
    x3 = a.x_mask ^ b.x_mask
    z3 = a.z_mask ^ b.z_mask
    # Power of i from P(x,z) = i^{x.z} X^x Z^z and commuting Z^z1 past X^x2.
    e = (
        (a.x_mask & a.z_mask).bit_count()
        + (b.x_mask & b.z_mask).bit_count()
        + 2 * (a.z_mask & b.x_mask).bit_count()
        - (x3 & z3).bit_count()
    ) % 4
    return _PHASES[e], PauliString.from_masks(a.n_qubits, x3, z3)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff [a, b] = 0: an even number of sites anticommute."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit mismatch: {a.n_qubits} vs {b.n_qubits}")
    parity = ((a.x_mask & b.z_mask).bit_count() + (a.z_mask & b.x_mask).bit_count()) % 2
    return parity == 0


@dataclass(frozen=True)
class PauliTerm:
    coeff: complex
    string: PauliString


class PauliSum:
    """Linear combination of Pauli strings on a fixed qubit count.

    Term order is preserved (simplify merges onto first occurrence), which
    keeps downstream grouping and serialization deterministic.
    """

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms: list[PauliTerm] | tuple[PauliTerm, ...] = ()):
        if n_qubits < 1:
            raise ValidationError("need at least one qubit")
        for t in terms:
            if t.string.n_qubits != n_qubits:
                raise DimensionError("term qubit count differs from sum")
        self.n_qubits = n_qubits
        self.terms = tuple(terms)

    @classmethod
    def from_terms(cls, pairs: list[tuple[complex, str]]) -> "PauliSum":
        """Build from (coefficient, letters) pairs; all strings equal length."""
        if not pairs:
            raise ValidationError("from_terms needs at least one term")
        terms = [PauliTerm(complex(c), PauliString(s)) for c, s in pairs]
        return cls(terms[0].string.n_qubits, terms)

    @classmethod
    def hermitian(cls, pairs: list[tuple[float, str]]) -> "PauliSum":
        """Like from_terms but rejects non-real coefficients."""
        for c, _ in pairs:
            if abs(complex(c).imag) > ATOL:
                raise ValidationError(f"non-real coefficient {c!r} in Hermitian sum")
        return cls.from_terms([(complex(c).real, s) for c, s in pairs])

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n_qubits, [PauliTerm(complex(coeff), PauliString.identity(n_qubits))])

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits, [])

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        if self.n_qubits != other.n_qubits:
            raise DimensionError("cannot add sums on different qubit counts")
        return PauliSum(self.n_qubits, self.terms + other.terms)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            if self.n_qubits != other.n_qubits:
                raise DimensionError("cannot multiply sums on different qubit counts")
            out = []
            for ta in self.terms:
                for tb in other.terms:
                    ph, s = multiply(ta.string, tb.string)
                    out.append(PauliTerm(ta.coeff * tb.coeff * ph, s))
            return PauliSum(self.n_qubits, out)
        return PauliSum(self.n_qubits, [PauliTerm(t.coeff * other, t.string) for t in self.terms])

    __rmul__ = __mul__

    def simplify(self, atol: float = ATOL) -> "PauliSum":
        """Merge duplicate strings and drop coefficients with |c| <= atol."""
        order: list[PauliString] = []
        acc: dict[PauliString, complex] = {}
        for t in self.terms:
            if t.string in acc:
                acc[t.string] += t.coeff
            else:
                acc[t.string] = t.coeff
                order.append(t.string)
        kept = [PauliTerm(acc[s], s) for s in order if abs(acc[s]) > atol]
        return PauliSum(self.n_qubits, kept)

    def is_hermitian(self, atol: float = 1e-10) -> bool:
        return all(abs(t.coeff.imag) <= atol for t in self.simplify().terms)

    def identity_part(self) -> complex:
        return sum(
            (t.coeff for t in self.terms if t.string.is_identity()),
            start=0.0 + 0j,
        )

    def to_matrix(self, max_qubits: int = 12) -> np.ndarray:
        if self.n_qubits > max_qubits:
            raise CapacityError(
                f"dense matrix for {self.n_qubits} qubits exceeds limit {max_qubits}"
            )
        dim = 1 << self.n_qubits
        m = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            m += t.coeff * t.string.to_matrix(max_qubits)
        return m

    def to_json_dict(self) -> dict:
        s = self.simplify()
        for t in s.terms:
            if abs(t.coeff.imag) > 1e-10:
                raise ValidationError("refusing to serialize non-Hermitian sum")
        return {
            "n_qubits": s.n_qubits,
            "terms": [{"coeff": t.coeff.real, "paulis": t.string.letters} for t in s.terms],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PauliSum":
        try:
            n = data["n_qubits"]
            raw = data["terms"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad Hamiltonian JSON: missing {exc}") from exc
        extra = set(data) - {"n_qubits", "terms"}
        if extra:
            raise ValidationError(f"bad Hamiltonian JSON: unknown keys {sorted(extra)}")
        if not isinstance(n, int) or n < 1:
            raise ValidationError("n_qubits must be a positive integer")
        terms = []
        for i, entry in enumerate(raw):
            extra = set(entry) - {"coeff", "paulis"}
            if extra:
                raise ValidationError(f"term {i}: unknown keys {sorted(extra)}")
            coeff = entry["coeff"]
            if isinstance(coeff, bool) or not isinstance(coeff, (int, float)):
                raise ValidationError(f"term {i}: coeff must be a real number")
            s = entry["paulis"]
            if not isinstance(s, str) or len(s) != n:
                raise ValidationError(f"term {i}: paulis must be a string of length {n}")
            terms.append(PauliTerm(complex(coeff), PauliString(s)))
        return cls(n, terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "PauliSum":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad Hamiltonian JSON: {exc}") from exc
        return cls.from_json_dict(data)

    def __repr__(self) -> str:
        body = " + ".join(f"({t.coeff})*{t.string.letters}" for t in self.terms[:6])
        if len(self.terms) > 6:
            body += f" + ... [{len(self.terms)} terms]"
        return f"PauliSum({self.n_qubits}, {body or '0'})"
