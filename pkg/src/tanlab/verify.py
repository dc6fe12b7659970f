"""Randomised property suites shared by the CLI ``verify`` command and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import mapcore, symbolic
from .inverse import BranchIndex, branch_inverse
from .mapcore import derivative, evaluate, pole_distance

CANTOR_LAMBDA = 4 + 4j


@dataclass
class SuiteResult:
    name: str
    checked: int
    failures: int
    worst: float
    tolerance: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.checked > 0 and self.failures == 0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = f" ({self.note})" if self.note else ""
        return (f"{verdict} {self.name}: {self.checked - self.failures}/{self.checked} "
                f"worst={self.worst:.3e} tol={self.tolerance:g}{extra}")


def _safe_points(rng: np.random.Generator, count: int, radius: float, pole_gap: float,
                 max_im: float = 30.0) -> list[complex]:
    out = []
    while len(out) < count:
        z = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        w = z * z
        if abs(z) <= radius and pole_distance(w) > pole_gap and abs(w.imag) < max_im:
            out.append(z)
    return out


def _rel(a: complex, b: complex) -> float:
    scale = abs(b)
    return abs(a - b) / scale if scale > 0 else abs(a - b)


def symmetry_suite(samples: int = 10_000, seed: int = 0, tol: float = 1e-12) -> SuiteResult:
    """Evenness f(-z) = f(z) and conjugation f_conj(lam)(conj z) = conj f_lam(z), for f and f'."""
    rng = np.random.default_rng(seed)
    zs = _safe_points(rng, samples, 3.0, 1e-3)
    lams = rng.uniform(-5, 5, samples) + 1j * rng.uniform(-5, 5, samples)
    worst, bad = 0.0, 0
    for lam, z in zip(lams, zs):
        lam = complex(lam)
        fz = evaluate(lam, z)
        dz = derivative(lam, z)
        errs = (
            _rel(evaluate(lam, -z), fz),
            _rel(evaluate(lam.conjugate(), z.conjugate()), fz.conjugate()),
            _rel(derivative(lam.conjugate(), z.conjugate()), dz.conjugate()),
        )
        e = max(errs)
        worst = max(worst, e)
        bad += e >= tol
    return SuiteResult("symmetry", samples, bad, worst, tol)


def inverse_suite(targets: int = 1_000, seed: int = 1, tol: float = 1e-9,
                  max_k: int = 5) -> SuiteResult:
    """Round trip f(f_k^{-1}(w)) = w for all |k| <= max_k and both signs."""
    rng = np.random.default_rng(seed)
    worst, bad, checked = 0.0, 0, 0
    done = 0
    while done < targets:
        lam = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        r = 10.0 * math.sqrt(rng.uniform())
        w = lam + r * complex(math.cos(t := rng.uniform(0, 2 * math.pi)), math.sin(t))
        if abs(w - (lam + 1j)) < 1e-6 or abs(w - (lam - 1j)) < 1e-6:
            continue
        done += 1
        for k in range(-max_k, max_k + 1):
            for sign in (1, -1):
                z = branch_inverse(lam, w, BranchIndex(k, sign))
                fz = evaluate(lam, z)
                err = math.inf if fz is mapcore.INFINITY else abs(fz - w)
                worst = max(worst, err)
                bad += not err < tol
                checked += 1
    return SuiteResult("inverse", checked, bad, worst, tol)


def derivative_suite(samples: int = 1_000, seed: int = 2, tol: float = 1e-6,
                     h: float = 1e-6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    zs = _safe_points(rng, samples, 2.0, 0.25)
    worst, bad = 0.0, 0
    for z in zs:
        lam = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        d = derivative(lam, z)
        fd = (evaluate(lam, z + h) - evaluate(lam, z - h)) / (2 * h)
        e = abs(d - fd) / (1 + abs(d))
        worst = max(worst, e)
        bad += e >= tol
    return SuiteResult("derivative", samples, bad, worst, tol)


def conjugacy_suite(count: int = 100, seed: int = 3, window: int = 8, max_depth: int = 8,
                    max_symbol: int = 8, lam: complex = CANTOR_LAMBDA) -> SuiteResult:
    """phi(f(z)) = sigma(phi(z)) for constructed pre-poles of depth <= max_depth."""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(count):
        depth = int(rng.integers(0, max_depth + 1))
        word = symbolic.random_word(rng, depth + 1, max_symbol)
        z = symbolic.cylinder_point(lam, word).representative_hp
        ok = symbolic.verify_conjugacy(lam, z, window) and symbolic.itinerary(lam, z, window + 1) == word
        bad += not ok
    return SuiteResult("conjugacy", count, bad, float(bad), 0.0)


def cylinder_suite(chains: int = 20, seed: int = 4, length: int = 8, max_symbol: int = 4,
                   ratio_tol: float = 0.01, lam: complex = CANTOR_LAMBDA) -> SuiteResult:
    """Diameters strictly decrease along extension chains; last/first below ratio_tol."""
    rng = np.random.default_rng(seed)
    bad, worst, rates = 0, 0.0, []
    for _ in range(chains):
        word = symbolic.random_word(rng, length, max_symbol, terminated=False)
        diams = [symbolic.cylinder_point(lam, w).diameter_estimate
                 for w in symbolic.extension_chain(word)]
        ratio = diams[-1] / diams[0]
        worst = max(worst, ratio)
        rates.append(symbolic.observed_contraction(diams))
        decreasing = all(b < a for a, b in zip(diams, diams[1:]))
        bad += not (decreasing and ratio < ratio_tol)
    note = f"mean per-symbol contraction {np.mean(rates):.3e}"
    return SuiteResult("cylinder", chains, bad, worst, ratio_tol, note)


def shift_metric_suite(triples: int = 10_000, seed: int = 5, length: int = 8,
                       max_symbol: int = 1) -> SuiteResult:
    """d(sx, sy) <= 2 d(x, y) and d(x, z) <= max(d(x, y), d(y, z))."""
    rng = np.random.default_rng(seed)
    bad = 0
    d = symbolic.sequence_distance
    for _ in range(triples):
        x, y, z = (symbolic.random_word(rng, length, max_symbol, terminated=bool(rng.integers(2)))
                   for _ in range(3))
        lipschitz = d(symbolic.shift(x), symbolic.shift(y)) <= 2 * d(x, y)
        ultra = d(x, z) <= max(d(x, y), d(y, z))
        bad += not (lipschitz and ultra)
    return SuiteResult("shift-metric", triples, bad, float(bad), 0.0)


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "symmetry": symmetry_suite,
    "inverse": inverse_suite,
    "derivative": derivative_suite,
    "conjugacy": conjugacy_suite,
    "cylinder": cylinder_suite,
    "shift-metric": shift_metric_suite,
}


def run_suites(name: str) -> list[SuiteResult]:
    if name == "all":
        return [fn() for fn in SUITES.values()]
    return [SUITES[name]()]
