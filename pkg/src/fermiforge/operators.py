"""Sparse Pauli-string and fermionic ladder-operator algebra.

A Pauli word is a sorted tuple of ``(qubit, axis)`` pairs with axis in
``{"X", "Y", "Z"}``; the empty tuple is the identity.  A QubitOperator maps
Pauli words to complex coefficients, a FermionOperator maps ordered ladder
sequences ``((index, 1|0), ...)`` (1 = creation, 0 = annihilation) to
complex coefficients.

Operators behave as immutable values: every public operation returns a new
object, so they are safe to share across threads.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Tuple, Union

from .errors import ValidationError

PauliWord = Tuple[Tuple[int, str], ...]
LadderTerm = Tuple[Tuple[int, int], ...]

AXES = ("X", "Y", "Z")

# Single-qubit products P1 * P2 -> (phase, axis or None for identity).
_PAULI_PRODUCT = {
    ("X", "X"): (1.0, None),
    ("Y", "Y"): (1.0, None),
    ("Z", "Z"): (1.0, None),
    ("X", "Y"): (1j, "Z"),
    ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("X", "Z"): (-1j, "Y"),
}


def validate_word(word: PauliWord) -> PauliWord:
    """Check strictly increasing qubit indices and known axes; return the word."""
    previous = -1
    for qubit, axis in word:
        if not isinstance(qubit, int) or qubit < 0:
            raise ValidationError(f"invalid qubit index in Pauli word: {qubit!r}")
        if qubit <= previous:
            raise ValidationError(f"Pauli word indices must be strictly increasing: {word!r}")
        if axis not in AXES:
            raise ValidationError(f"unknown Pauli axis {axis!r} (expected X, Y or Z)")
        previous = qubit
    return tuple(word)


def word_from_string(text: str) -> PauliWord:
    """Parse a word like ``"X0 Z1"`` (empty string = identity)."""
    factors = {}
    for token in text.split():
        axis, index = token[0].upper(), token[1:]
        if axis not in AXES or not index.isdigit():
            raise ValidationError(f"cannot parse Pauli factor {token!r}")
        qubit = int(index)
        if qubit in factors:
            raise ValidationError(f"duplicate qubit {qubit} in Pauli word {text!r}")
        factors[qubit] = axis
    return tuple(sorted(factors.items()))


def word_to_string(word: PauliWord) -> str:
    """Canonical rendering, e.g. ``"X0 Z1"``; identity renders as ``""``."""
    return " ".join(f"{axis}{qubit}" for qubit, axis in word)


def multiply_words(w1: PauliWord, w2: PauliWord) -> Tuple[complex, PauliWord]:
    """Product of two Pauli words with phase tracking (XY = iZ, ...)."""
    phase = 1.0 + 0j
    result = []
    d2 = dict(w2)
    for qubit, axis in w1:
        other = d2.pop(qubit, None)
        if other is None:
            result.append((qubit, axis))
            continue
        factor, product_axis = _PAULI_PRODUCT[(axis, other)]
        phase *= factor
        if product_axis is not None:
            result.append((qubit, product_axis))
    result.extend(d2.items())
    result.sort()
    return phase, tuple(result)


def words_commute(w1: PauliWord, w2: PauliWord) -> bool:
    """True iff the words commute (even number of anticommuting shared factors)."""
    d2 = dict(w2)
    anti = sum(1 for qubit, axis in w1 if d2.get(qubit, axis) != axis)
    return anti % 2 == 0


def qwc_compatible(w1: PauliWord, w2: PauliWord) -> bool:
    """Qubit-wise commutativity: on every shared qubit the axes are equal."""
    d2 = dict(w2)
    return all(d2.get(qubit, axis) == axis for qubit, axis in w1)


def _coerce_term(term) -> PauliWord:
    if term is None:
        return ()
    if isinstance(term, str):
        return word_from_string(term)
    return validate_word(tuple((int(q), a) for q, a in term))


class QubitOperator:
    """Linear combination of Pauli words with complex coefficients.

    Construction mirrors the usual sparse-operator idiom::

        QubitOperator()                      # zero operator
        QubitOperator("")                    # identity
        QubitOperator("X0 Z1", 0.25)
        QubitOperator(((0, "X"), (1, "Z")), 0.25)
    """

    __slots__ = ("terms",)

    def __init__(self, term=None, coefficient: complex = 1.0):
        self.terms: dict[PauliWord, complex] = {}
        if term is not None:
            self.terms[_coerce_term(term)] = complex(coefficient)

    @classmethod
    def zero(cls) -> "QubitOperator":
        return cls()

    @classmethod
    def identity(cls, coefficient: complex = 1.0) -> "QubitOperator":
        return cls((), coefficient)

    @classmethod
    def from_terms(cls, terms: Mapping[PauliWord, complex]) -> "QubitOperator":
        op = cls()
        for word, coeff in terms.items():
            if coeff != 0:
                op.terms[validate_word(word)] = complex(coeff)
        return op

    # -- bookkeeping ----------------------------------------------------

    @property
    def n_qubits(self) -> int:
        """1 + largest qubit index used (0 for the pure identity/zero operator)."""
        width = 0
        for word in self.terms:
            if word:
                width = max(width, word[-1][0] + 1)
        return width

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def constant(self) -> complex:
        return self.terms.get((), 0j)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        """Pauli words are Hermitian, so Hermiticity = all coefficients real."""
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def __iter__(self) -> Iterator[Tuple[PauliWord, complex]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QubitOperator):
            return NotImplemented
        return self.terms == other.terms

    def isclose(self, other: "QubitOperator", tol: float = 1e-12) -> bool:
        words = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(w, 0) - other.terms.get(w, 0)) <= tol for w in words)

    # -- algebra --------------------------------------------------------

    def __add__(self, other) -> "QubitOperator":
        result = QubitOperator()
        result.terms = dict(self.terms)
        if isinstance(other, QubitOperator):
            for word, coeff in other.terms.items():
                total = result.terms.get(word, 0j) + coeff
                if total == 0:
                    result.terms.pop(word, None)
                else:
                    result.terms[word] = total
            return result
        if isinstance(other, (int, float, complex)):
            return self + QubitOperator.identity(other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other) -> "QubitOperator":
        return self + (-1.0) * other

    def __neg__(self) -> "QubitOperator":
        return (-1.0) * self

    def __mul__(self, other) -> "QubitOperator":
        if isinstance(other, (int, float, complex)):
            result = QubitOperator()
            if other != 0:
                result.terms = {w: c * other for w, c in self.terms.items()}
            return result
        if isinstance(other, QubitOperator):
            result = QubitOperator()
            accum = result.terms
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    phase, word = multiply_words(w1, w2)
                    total = accum.get(word, 0j) + phase * c1 * c2
                    if total == 0:
                        accum.pop(word, None)
                    else:
                        accum[word] = total
            return result
        return NotImplemented

    def __rmul__(self, other) -> "QubitOperator":
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def compress(self, abs_tol: float = 1e-12) -> "QubitOperator":
        """Drop terms with |coefficient| < abs_tol; zero imaginary parts below abs_tol.

        Returns a new operator; idempotent.
        """
        if abs_tol < 0:
            raise ValidationError("compress tolerance must be >= 0")
        result = QubitOperator()
        for word, coeff in self.terms.items():
            if abs(coeff.imag) < abs_tol or coeff.imag == 0:
                coeff = complex(coeff.real, 0.0)
            if abs(coeff.real) < abs_tol or coeff.real == 0:
                coeff = complex(0.0, coeff.imag)
            if coeff != 0 and abs(coeff) >= abs_tol:
                result.terms[word] = coeff
        return result

    def hermitian_conjugate(self) -> "QubitOperator":
        result = QubitOperator()
        result.terms = {w: c.conjugate() for w, c in self.terms.items()}
        return result

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for word in sorted(self.terms):
            coeff = self.terms[word]
            label = word_to_string(word)
            parts.append(f"{coeff} [{label}]")
        return " + ".join(parts)


def commutator(a: QubitOperator, b: QubitOperator) -> QubitOperator:
    """ab - ba."""
    return a * b - b * a


def compress(op: QubitOperator, abs_tol: float = 1e-12) -> QubitOperator:
    """Functional alias for :meth:`QubitOperator.compress`."""
    return op.compress(abs_tol)


def _coerce_ladder(term) -> LadderTerm:
    if term is None:
        return ()
    if isinstance(term, str):
        parsed = []
        for token in term.split():
            if token.endswith("^"):
                parsed.append((int(token[:-1]), 1))
            else:
                parsed.append((int(token), 0))
        term = parsed
    out = []
    for index, action in term:
        index, action = int(index), int(action)
        if index < 0:
            raise ValidationError(f"negative spin-orbital index: {index}")
        if action not in (0, 1):
            raise ValidationError(f"ladder action must be 0 (annihilate) or 1 (create), got {action}")
        out.append((index, action))
    return tuple(out)


class FermionOperator:
    """Linear combination of ladder-operator sequences.

    Terms are stored exactly as given (no normal ordering).  String
    construction uses ``^`` for creation: ``FermionOperator("1^ 0", 0.5)``
    is 0.5 * a†_1 a_0; the empty sequence is the constant term.
    """

    __slots__ = ("terms",)

    def __init__(self, term=None, coefficient: complex = 1.0):
        self.terms: dict[LadderTerm, complex] = {}
        if term is not None:
            self.terms[_coerce_ladder(term)] = complex(coefficient)

    @classmethod
    def zero(cls) -> "FermionOperator":
        return cls()

    @property
    def n_modes(self) -> int:
        """1 + largest spin-orbital index used."""
        width = 0
        for seq in self.terms:
            for index, _ in seq:
                width = max(width, index + 1)
        return width

    def __iter__(self) -> Iterator[Tuple[LadderTerm, complex]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FermionOperator):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other) -> "FermionOperator":
        if not isinstance(other, FermionOperator):
            return NotImplemented
        result = FermionOperator()
        result.terms = dict(self.terms)
        for seq, coeff in other.terms.items():
            total = result.terms.get(seq, 0j) + coeff
            if total == 0:
                result.terms.pop(seq, None)
            else:
                result.terms[seq] = total
        return result

    def __mul__(self, other) -> "FermionOperator":
        if isinstance(other, (int, float, complex)):
            result = FermionOperator()
            if other != 0:
                result.terms = {s: c * other for s, c in self.terms.items()}
            return result
        if isinstance(other, FermionOperator):
            result = FermionOperator()
            for s1, c1 in self.terms.items():
                for s2, c2 in other.terms.items():
                    seq = s1 + s2
                    result.terms[seq] = result.terms.get(seq, 0j) + c1 * c2
            return result
        return NotImplemented

    def __rmul__(self, other) -> "FermionOperator":
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __sub__(self, other) -> "FermionOperator":
        return self + (-1.0) * other

    def hermitian_conjugate(self) -> "FermionOperator":
        result = FermionOperator()
        for seq, coeff in self.terms.items():
            conj_seq = tuple((index, 1 - action) for index, action in reversed(seq))
            result.terms[conj_seq] = result.terms.get(conj_seq, 0j) + coeff.conjugate()
        return result

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for seq in sorted(self.terms):
            label = " ".join(f"{i}^" if a else f"{i}" for i, a in seq)
            parts.append(f"{self.terms[seq]} [{label}]")
        return " + ".join(parts)
