"""Named walk families with closed-form distributions and spectral data.

Five parameterized Kraus pairs are provided:

    ex1    diagonal pair, B=diag(1, sqrt(p)), C=diag(0, sqrt(q))
    ex2    unitary-coin pair (U = B + C unitary), a correlated walk
    ex3    lazy drift pair with off-diagonal coupling gamma
    ex4    commuting pair whose law is a mixture of two binomials
    ex5    the (1/sqrt 3) upper/lower triangular pair

ex1/ex3/ex4 have exact finite-sum laws (`closed_form`). ex5 has an exact
combinatorial evaluator (`cut_unfold_distribution`, rational arithmetic) and
explicit dual-symbol eigenvalues (`ex5_spectrum`). These serve as oracles for
the generic engines; the engines never call into this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import binom

from .core import KrausPair, validate_kraus_pair
from .distribution import Distribution
from .exceptions import ParameterError, SizeError, UnsupportedExample

_DEFAULTS: dict[str, dict[str, float]] = {
    "ex1": {"p": 0.5},
    "ex2": {"p": 0.5, "phi1": 0.0, "phi2": 0.0, "phi3": 0.0},
    "ex3": {"p": 0.5, "gamma": 0.5},
    "ex4": {"eps": 0.2, "theta": 0.0},
    "ex5": {},
}

CUT_UNFOLD_MAX_STEPS = 14


@dataclass(frozen=True)
class ExampleSpec:
    """A catalog identifier plus parameter overrides."""

    id: str
    params: dict[str, float] = field(default_factory=dict)

    def text(self) -> str:
        if not self.params:
            return self.id
        body = ",".join(f"{k}={self.params[k]!r}" for k in sorted(self.params))
        return f"{self.id}:{body}"


def parse_example_spec(text: str) -> ExampleSpec:
    """Parse 'ex3:p=0.5,gamma=0.4' style strings. Unknown keys are rejected."""
    ident, _, tail = text.strip().partition(":")
    if ident not in _DEFAULTS:
        raise ParameterError(
            f"unknown example {ident!r}; expected one of {sorted(_DEFAULTS)}"
        )
    allowed = _DEFAULTS[ident]
    params: dict[str, float] = {}
    if tail:
        for item in tail.split(","):
            key, sep, val = item.partition("=")
            key = key.strip()
            if not sep:
                raise ParameterError(f"malformed parameter {item!r}; expected key=value")
            if key not in allowed:
                raise ParameterError(
                    f"unknown parameter {key!r} for {ident}; allowed: {sorted(allowed) or 'none'}"
                )
            try:
                params[key] = float(val)
            except ValueError:
                raise ParameterError(f"parameter {key!r} has non-numeric value {val!r}") from None
    return ExampleSpec(ident, params)


def _merged_params(spec: ExampleSpec) -> dict[str, float]:
    allowed = _DEFAULTS.get(spec.id)
    if allowed is None:
        raise ParameterError(f"unknown example {spec.id!r}")
    extra = set(spec.params) - set(allowed)
    if extra:
        raise ParameterError(f"unknown parameter(s) {sorted(extra)} for {spec.id}")
    return {**allowed, **spec.params}


def build(spec: ExampleSpec) -> KrausPair:
    """Construct the literal matrices of the requested example."""
    par = _merged_params(spec)
    if spec.id == "ex1":
        p = par["p"]
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"p={p} violates 0 <= p <= 1")
        B = np.diag([1.0, math.sqrt(p)])
        C = np.diag([0.0, math.sqrt(1.0 - p)])
    elif spec.id == "ex2":
        p = par["p"]
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"p={p} violates 0 <= p <= 1")
        sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
        f1, f2, f3 = par["phi1"], par["phi2"], par["phi3"]
        # U = B + C is unitary iff the second column is (up to the free
        # phases) the orthogonal complement of the first, which forces the
        # relative sign of c22.
        b11 = sp * np.exp(1j * f1)
        b21 = sq * np.exp(1j * f2)
        c12 = sq * np.exp(1j * f3)
        c22 = -sp * np.exp(1j * (f2 + f3 - f1))
        B = np.array([[b11, 0], [b21, 0]])
        C = np.array([[0, c12], [0, c22]])
    elif spec.id == "ex3":
        p, gamma = par["p"], par["gamma"]
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"p={p} violates 0 <= p <= 1")
        cap = min(math.sqrt(2 * p), math.sqrt(2 * (1.0 - p)))
        if not 0.0 < gamma <= cap:
            raise ParameterError(
                f"gamma={gamma} violates 0 < gamma <= min(sqrt(2p), sqrt(2q)) = {cap:.6g}"
            )
        pt = p - gamma**2 / 2
        qt = (1.0 - p) - gamma**2 / 2
        B = np.array([[1.0, 0.0], [0.0, math.sqrt(max(pt, 0.0))]])
        C = np.array([[0.0, gamma], [0.0, math.sqrt(max(qt, 0.0))]])
    elif spec.id == "ex4":
        eps, theta = par["eps"], par["theta"]
        if not 0.0 < eps <= math.sqrt(0.5):
            raise ParameterError(f"eps={eps} violates 0 < eps <= sqrt(1/2)")
        a = math.sqrt(0.5 - eps * eps)
        if not 2 * eps * a < 0.5:
            raise ParameterError(f"eps={eps} violates 2*eps*sqrt(1/2 - eps^2) < 1/2")
        off = eps * np.exp(1j * theta)
        B = np.array([[a, off], [off, a]])
        C = np.array([[a, -off], [-off, a]])
    elif spec.id == "ex5":
        r = 1.0 / math.sqrt(3.0)
        B = r * np.array([[1.0, 1.0], [0.0, 1.0]])
        C = r * np.array([[1.0, 0.0], [-1.0, 1.0]])
    else:  # pragma: no cover - guarded by _merged_params
        raise ParameterError(f"unknown example {spec.id!r}")
    return validate_kraus_pair(B, C)


def all_examples() -> list[ExampleSpec]:
    """Default instance of every catalog entry."""
    return [ExampleSpec(ident) for ident in _DEFAULTS]


# -- closed forms ------------------------------------------------------------


def _check_diag(rho0_diag) -> tuple[float, float]:
    a, b = (float(v) for v in rho0_diag)
    if a < 0 or b < 0 or abs(a + b - 1.0) > 1e-12:
        raise ParameterError(f"rho0 diagonal ({a}, {b}) must be nonnegative and sum to 1")
    return a, b


def closed_form(spec: ExampleSpec, rho0_diag, n: int) -> Distribution:
    """Exact time-n law for ex1/ex3/ex4 started from diag(a, b) at the origin.

    ex1:  p_x = a [x=-n] + b sum_l C(n,l) p^l q^(n-l) [x=n-2l]
    ex3:  the a-sector sticks at -n; the b-sector adds a geometric dressing
          of lazy binomials (double sum over the coupling time j)
    ex4:  equal mixture of Binomial(n, lam+) and Binomial(n, lam-) where
          lam+- = 1/2 +- 2 eps a(eps) cos(theta)

    ex2 and ex5 have no finite closed form here; use the lattice or dual
    engines (or cut_unfold_distribution for ex5).
    """
    par = _merged_params(spec)
    a, b = _check_diag(rho0_diag)
    if n < 0:
        raise ValueError("n must be >= 0")
    if spec.id in ("ex2", "ex5"):
        raise UnsupportedExample(f"{spec.id} has no closed-form law; use the engines")
    if spec.id not in ("ex1", "ex3", "ex4"):
        raise ParameterError(f"unknown example {spec.id!r}")
    if n == 0:
        return Distribution({0: 1.0})

    # Accumulate on the even sublattice: coeff[i] is the mass at x = 2i - n.
    coeff = np.zeros(n + 1)
    ls = np.arange(n + 1)
    if spec.id == "ex1":
        p = par["p"]
        coeff[0] += a
        np.add.at(coeff, n - ls, b * binom.pmf(ls, n, p))
    elif spec.id == "ex4":
        eps, theta = par["eps"], par["theta"]
        ae = math.sqrt(0.5 - eps * eps)
        lam_p = 0.5 + 2 * eps * ae * math.cos(theta)
        lam_m = 0.5 - 2 * eps * ae * math.cos(theta)
        U = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
        w = U @ np.diag([a, b]) @ U.conj().T
        a1, a2 = w[0, 0].real, w[1, 1].real
        mix = a1 * binom.pmf(ls, n, lam_p) + a2 * binom.pmf(ls, n, lam_m)
        np.add.at(coeff, n - ls, mix)
    else:
        gamma = par["gamma"]
        pt = par["p"] - gamma**2 / 2
        qt = (1.0 - par["p"]) - gamma**2 / 2
        _ex3_accumulate(coeff, a, b, pt, qt, gamma, n)
    sites = 2 * np.arange(n + 1) - n
    keep = coeff > 0
    return Distribution((sites[keep], coeff[keep]))


def _ex3_accumulate(coeff: np.ndarray, a: float, b: float, pt: float, qt: float, gamma: float, n: int) -> None:
    coeff[0] += a
    g2 = gamma * gamma
    w = pt + qt
    if w > 0:
        r = pt / w
        for j in range(n):
            l = np.arange(j + 1)
            # C(j,l) pt^l qt^(j-l) = w^j Binomial(j, pt/w).pmf(l), stable for
            # large j where the raw powers under/overflow.
            np.add.at(coeff, j - l + 1, b * g2 * w**j * binom.pmf(l, j, r))
        l = np.arange(n + 1)
        np.add.at(coeff, n - l, b * w**n * binom.pmf(l, n, r))
    else:
        # pt = qt = 0: the only surviving dressing term is j = 0.
        coeff[1] += b * g2


def _recover_ex3(kp: KrausPair) -> tuple[float, float, float]:
    """Read (pt, qt, gamma) back from an ex3-shaped pair."""
    B, C = kp
    ok = (
        abs(B[0, 0] - 1.0) <= 1e-12
        and abs(B[0, 1]) <= 1e-12
        and abs(B[1, 0]) <= 1e-12
        and abs(C[0, 0]) <= 1e-12
        and abs(C[1, 0]) <= 1e-12
        and abs(B[1, 1].imag) <= 1e-12
        and abs(C[1, 1].imag) <= 1e-12
        and abs(C[0, 1].imag) <= 1e-12
        and C[0, 1].real > 0
        and B[1, 1].real >= 0
        and C[1, 1].real >= 0
    )
    if not ok:
        raise ParameterError("pair is not of the lazy-drift (ex3) shape")
    return float(B[1, 1].real ** 2), float(C[1, 1].real ** 2), float(C[0, 1].real)


def _ex3_closed_form(a: float, b: float, pt: float, qt: float, gamma: float, n: int) -> dict[int, float]:
    if n == 0:
        return {0: 1.0}
    coeff = np.zeros(n + 1)
    _ex3_accumulate(coeff, a, b, pt, qt, gamma, n)
    return {int(2 * i - n): float(coeff[i]) for i in range(n + 1) if coeff[i] > 0}


# -- ex5 spectrum ------------------------------------------------------------


@dataclass(frozen=True)
class Ex5Spectrum:
    """Eigendata of the ex5 dual symbol at momentum k.

    xi is the real cube root (2 cos k + sqrt(4 cos^2 k + 1))^(1/3); the
    radicand exceeds 1 for every real k, so no branch handling is needed.
    s = xi - 1/xi lies in [-1, 1]. The four eigenvalues, written through s:

        lam0 = s(s^2+3)/6 = 2cos(k)/3
        lam1 = s(s^2+5)/6
        lam2 = s(s^2+2)/6 + i sqrt(3)/6 sqrt(s^2+4),  lam3 = conj(lam2)

    A holds the gaps lam_j - lam0 for j = 1, 2, 3.
    """

    k: float
    xi: float
    s: float
    u: float
    lam: tuple[complex, complex, complex, complex]
    A: tuple[complex, complex, complex]


def ex5_spectrum(k: float) -> Ex5Spectrum:
    k = float(k)
    u = math.cos(k)
    xi = (2 * u + math.sqrt(4 * u * u + 1)) ** (1.0 / 3.0)
    s = xi - 1.0 / xi
    lam0 = complex(s * (s * s + 3) / 6)
    lam1 = complex(s * (s * s + 5) / 6)
    lam2 = complex(s * (s * s + 2) / 6, math.sqrt(3) / 6 * math.sqrt(s * s + 4))
    lam3 = lam2.conjugate()
    lam = (lam0, lam1, lam2, lam3)
    return Ex5Spectrum(k, xi, s, u, lam, (lam1 - lam0, lam2 - lam0, lam3 - lam0))


def ex5_lambda1(k) -> np.ndarray | float:
    """Dominant eigenvalue branch lam1, vectorized over k."""
    u = np.cos(k)
    xi = np.cbrt(2 * u + np.sqrt(4 * u * u + 1))
    s = xi - 1.0 / xi
    return s * (s * s + 5) / 6


def ex5_power_traces(l: int) -> float:
    """Tr(B*^l B^l) = Tr(C*^l C^l) = (l^2 + 2) / 3^l for the ex5 pair."""
    if l < 0:
        raise ValueError("l must be >= 0")
    value = (l * l + 2) / 3.0**l
    B, C = build(ExampleSpec("ex5"))
    Bl = np.linalg.matrix_power(B, l)
    Cl = np.linalg.matrix_power(C, l)
    got_b = np.trace(Bl.conj().T @ Bl).real
    got_c = np.trace(Cl.conj().T @ Cl).real
    if abs(got_b - value) > 1e-12 or abs(got_c - value) > 1e-12:  # pragma: no cover
        raise AssertionError(f"power-trace identity failed at l={l}")
    return value


# -- cutting / unfolding -----------------------------------------------------
#
# Expanding the n-th dual power of the ex5 pair gives one term per word in
# B, C; a word is encoded by its run lengths. Because
# B*^m B^m + C*^m C^m = ((m^2+2)/3^m) I, the innermost run of a word can be
# either cut away (weight (m^2+2)/3^m) or unfolded into the surrounding run
# with flipped type (weight -1). Repeating until one run remains reduces the
# word to weighted single-power traces, all evaluated in exact rationals.


@dataclass(frozen=True)
class CutUnfoldSeq:
    """A partially shortened run sequence.

    segments are the run lengths from outermost to innermost; inner is the
    type ("B" or "C") of the innermost run, with types alternating outward;
    weight is the rational factor accumulated by the shortening steps so far.
    """

    segments: tuple[int, ...]
    inner: str
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        if self.inner not in ("B", "C"):
            raise ValueError("inner must be 'B' or 'C'")
        if not self.segments or any(s < 1 for s in self.segments):
            raise ValueError("segments must be a nonempty tuple of positive lengths")

    def displacement(self) -> int:
        """Net displacement: C runs move right (+), B runs move left (-)."""
        sign = 1 if self.inner == "C" else -1
        total = 0
        for length in reversed(self.segments):
            total += sign * length
            sign = -sign
        return total


def _flip(t: str) -> str:
    return "C" if t == "B" else "B"


def cut_step(seq: CutUnfoldSeq) -> CutUnfoldSeq:
    """Remove the innermost run of length m, picking up weight (m^2+2)/3^m."""
    if len(seq.segments) < 2:
        raise ValueError("cannot shorten a single-run sequence")
    m = seq.segments[-1]
    w = seq.weight * Fraction(m * m + 2, 3**m)
    return CutUnfoldSeq(seq.segments[:-1], _flip(seq.inner), w)


def unfold_step(seq: CutUnfoldSeq) -> CutUnfoldSeq:
    """Merge the innermost run into its neighbour, picking up weight -1."""
    if len(seq.segments) < 2:
        raise ValueError("cannot shorten a single-run sequence")
    m = seq.segments[-1]
    segments = seq.segments[:-2] + (seq.segments[-2] + m,)
    return CutUnfoldSeq(segments, _flip(seq.inner), -seq.weight)


def _trace_b(l: int, a: Fraction, b: Fraction) -> Fraction:
    return (a + b * (l * l + 1)) / 3**l


def _trace_c(l: int, a: Fraction, b: Fraction) -> Fraction:
    return (a * (l * l + 1) + b) / 3**l


def _evaluate(runs: tuple[int, ...], inner_b: bool, a: Fraction, b: Fraction, memo: dict) -> Fraction:
    key = (runs, inner_b)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if len(runs) == 1:
        val = _trace_b(runs[0], a, b) if inner_b else _trace_c(runs[0], a, b)
    else:
        m = runs[-1]
        cut = Fraction(m * m + 2, 3**m) * _evaluate(runs[:-1], not inner_b, a, b, memo)
        unfolded = _evaluate(runs[:-2] + (runs[-2] + m,), not inner_b, a, b, memo)
        val = cut - unfolded
    memo[key] = val
    return val


def sequence_contribution(seq: CutUnfoldSeq, rho0_diag) -> Fraction:
    """Total weighted trace over every shortening of seq, times seq.weight."""
    a, b = _check_diag(rho0_diag)
    fa = Fraction(a)
    return seq.weight * _evaluate(seq.segments, seq.inner == "B", fa, 1 - fa, {})


def _compositions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first, *rest)


def cut_unfold_exact(rho0_diag, n: int) -> dict[int, Fraction]:
    """Exact rational law at time n, keyed by site."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > CUT_UNFOLD_MAX_STEPS:
        raise SizeError(f"n={n} exceeds the enumeration bound {CUT_UNFOLD_MAX_STEPS}")
    a, _ = _check_diag(rho0_diag)
    fa = Fraction(a)
    fb = 1 - fa
    if n == 0:
        return {0: Fraction(1)}
    memo: dict = {}
    out: dict[int, Fraction] = {}
    for runs in _compositions(n):
        for inner_b in (True, False):
            seq = CutUnfoldSeq(runs, "B" if inner_b else "C")
            x = seq.displacement()
            out[x] = out.get(x, Fraction(0)) + _evaluate(runs, inner_b, fa, fb, memo)
    return {x: v for x, v in sorted(out.items()) if v}


def cut_unfold_distribution(rho0_diag, n: int) -> Distribution:
    exact = cut_unfold_exact(rho0_diag, n)
    return Distribution({x: float(v) for x, v in exact.items()})
