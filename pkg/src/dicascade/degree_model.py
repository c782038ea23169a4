"""Joint in/out-degree distributions and degree sequences.

A node's class is the pair ``(k, l)`` of its in-degree and out-degree.
Distributions live on a bounded support that never contains ``(0, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .rng import make_rng

SUM_TOL = 1e-12


@dataclass(frozen=True)
class MarginalSpec:
    """One of the three single-degree laws: deterministic, uniform, zipf.

    ``lo``/``hi`` bound the (inclusive) integer range; for a deterministic
    law both equal ``value``.
    """

    kind: str
    lo: int
    hi: int
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in ("deterministic", "uniform", "zipf"):
            raise ValueError(f"unknown marginal kind {self.kind!r}")
        if self.lo < 0:
            raise ValueError(f"lower bound must be >= 0, got {self.lo}")
        if self.hi < self.lo:
            raise ValueError(f"empty degree range [{self.lo}, {self.hi}]")
        if self.kind == "deterministic" and self.lo != self.hi:
            raise ValueError("deterministic marginal needs lo == hi")
        if self.kind == "zipf":
            if self.exponent <= 0:
                raise ValueError(f"zipf exponent must be > 0, got {self.exponent}")
            if self.lo == 0:
                raise ValueError("zipf law is undefined at degree 0")

    @classmethod
    def deterministic(cls, value: int) -> "MarginalSpec":
        return cls("deterministic", value, value)

    @classmethod
    def uniform(cls, lo: int, hi: int) -> "MarginalSpec":
        return cls("uniform", lo, hi)

    @classmethod
    def zipf(cls, lo: int, hi: int, exponent: float) -> "MarginalSpec":
        return cls("zipf", lo, hi, float(exponent))

    def to_dict(self) -> dict:
        if self.kind == "deterministic":
            return {"kind": "deterministic", "value": self.lo}
        if self.kind == "uniform":
            return {"kind": "uniform", "lo": self.lo, "hi": self.hi}
        return {"kind": "zipf", "lo": self.lo, "hi": self.hi, "exponent": self.exponent}

    @classmethod
    def from_dict(cls, d: dict) -> "MarginalSpec":
        d = dict(d)
        kind = d.pop("kind", None)
        allowed = {
            "deterministic": {"value"},
            "uniform": {"lo", "hi"},
            "zipf": {"lo", "hi", "exponent"},
        }
        if kind not in allowed:
            raise ValueError(f"unknown marginal kind {kind!r}")
        if set(d) != allowed[kind]:
            raise ValueError(
                f"{kind} marginal expects fields {sorted(allowed[kind])}, got {sorted(d)}"
            )
        for key, val in d.items():
            if key != "exponent" and (isinstance(val, bool) or not isinstance(val, int)):
                raise ValueError(f"marginal field {key!r} must be an integer, got {val!r}")
        if kind == "deterministic":
            return cls.deterministic(d["value"])
        if kind == "uniform":
            return cls.uniform(d["lo"], d["hi"])
        return cls.zipf(d["lo"], d["hi"], float(d["exponent"]))


def make_marginal_pmf(spec: MarginalSpec) -> np.ndarray:
    """Probability vector ``p`` indexed by degree, ``p[k] = P(degree = k)``.

    The vector has length ``spec.hi + 1``; entries below ``spec.lo`` are 0.
    """
    p = np.zeros(spec.hi + 1)
    ks = np.arange(spec.lo, spec.hi + 1)
    if spec.kind == "deterministic":
        p[spec.lo] = 1.0
    elif spec.kind == "uniform":
        p[ks] = 1.0 / len(ks)
    else:
        w = ks.astype(float) ** (-spec.exponent)
        p[ks] = w / w.sum()
    return p


@dataclass(frozen=True, eq=False)
class JointDegreePMF:
    """Distribution ``f(k, l)`` over degree classes.

    Support points are stored in lexicographic ``(k, l)`` order as three
    parallel arrays.
    """

    k: np.ndarray
    l: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=np.int64)
        l = np.asarray(self.l, dtype=np.int64)
        p = np.asarray(self.p, dtype=float)
        if not (k.shape == l.shape == p.shape) or k.ndim != 1 or len(k) == 0:
            raise ValueError("support arrays must be non-empty, 1-d and of equal length")
        if np.any(k < 0) or np.any(l < 0):
            raise ValueError("degrees must be non-negative")
        if np.any((k == 0) & (l == 0)):
            raise ValueError("class (0, 0) is not allowed in the support")
        if np.any(p <= 0) or not np.all(np.isfinite(p)):
            raise ValueError("all support masses must be positive and finite")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"masses sum to {p.sum()!r}, not 1")
        order = np.lexsort((l, k))
        k, l, p = k[order], l[order], p[order]
        if len(k) > 1 and np.any((np.diff(k) == 0) & (np.diff(l) == 0)):
            raise ValueError("duplicate support points")
        for name, arr in (("k", k), ("l", l), ("p", p)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_dict(cls, masses: dict) -> "JointDegreePMF":
        """Build from ``{(k, l): mass}``; masses are renormalized."""
        items = [(int(k), int(l), float(m)) for (k, l), m in masses.items() if m > 0]
        k, l, p = (np.array(x) for x in zip(*items))
        return cls(k, l, p / p.sum())

    @property
    def k_max(self) -> int:
        return int(self.k.max())

    @property
    def l_max(self) -> int:
        return int(self.l.max())

    @property
    def classes(self) -> list[tuple[int, int]]:
        return list(zip(self.k.tolist(), self.l.tolist()))

    def __len__(self) -> int:
        return len(self.p)

    def index(self, k: int, l: int) -> int:
        hit = np.flatnonzero((self.k == k) & (self.l == l))
        if len(hit) == 0:
            raise KeyError((k, l))
        return int(hit[0])

    def mass(self, k: int, l: int) -> float:
        try:
            return float(self.p[self.index(k, l)])
        except KeyError:
            return 0.0

    def as_dict(self) -> dict:
        return dict(zip(self.classes, self.p.tolist()))


def product_joint(in_pmf: Iterable[float], out_pmf: Iterable[float]) -> JointDegreePMF:
    """Independent joint law ``f(k, l) = p_in(k) p_out(l)`` with (0,0) removed."""
    pin = np.asarray(in_pmf, dtype=float)
    pout = np.asarray(out_pmf, dtype=float)
    joint = np.outer(pin, pout)
    joint[0, 0] = 0.0
    if joint.sum() <= 0:
        raise ValueError("both marginals put all their mass at degree 0")
    k, l = np.nonzero(joint > 0)
    p = joint[k, l]
    return JointDegreePMF(k, l, p / p.sum())


def moments(pmf: JointDegreePMF) -> tuple[float, float, float, float]:
    """``(E K, E L, Var K, Var L)`` computed exactly over the support."""
    ek = float(np.dot(pmf.p, pmf.k))
    el = float(np.dot(pmf.p, pmf.l))
    vk = float(np.dot(pmf.p, (pmf.k - ek) ** 2))
    vl = float(np.dot(pmf.p, (pmf.l - el) ** 2))
    return ek, el, vk, vl


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    in_deg: np.ndarray
    out_deg: np.ndarray

    def __post_init__(self):
        ind = np.asarray(self.in_deg, dtype=np.int64).copy()
        outd = np.asarray(self.out_deg, dtype=np.int64).copy()
        if ind.shape != outd.shape or ind.ndim != 1:
            raise ValueError("in/out degree lists must be 1-d and of equal length")
        if np.any(ind < 0) or np.any(outd < 0):
            raise ValueError("degrees must be non-negative")
        ind.setflags(write=False)
        outd.setflags(write=False)
        object.__setattr__(self, "in_deg", ind)
        object.__setattr__(self, "out_deg", outd)

    @property
    def n(self) -> int:
        return len(self.in_deg)

    @property
    def is_balanced(self) -> bool:
        return int(self.in_deg.sum()) == int(self.out_deg.sum())

    def __eq__(self, other):
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return np.array_equal(self.in_deg, other.in_deg) and np.array_equal(
            self.out_deg, other.out_deg
        )


def sample_degree_sequence(pmf: JointDegreePMF, n: int, seed) -> DegreeSequence:
    """Draw ``n`` i.i.d. classes from ``pmf``.

    The support excludes (0, 0), so this is equivalent to drawing the two
    marginals and rejecting (0, 0) nodes.  The result is not balanced.
    """
    if n < 1:
        raise ValueError(f"node count must be >= 1, got {n}")
    rng = make_rng(seed)
    idx = rng.choice(len(pmf), size=n, p=pmf.p)
    return DegreeSequence(pmf.k[idx], pmf.l[idx])


def balance_stubs(seq: DegreeSequence, seed) -> DegreeSequence:
    """Equalize stub totals by adding the deficit to the smaller side.

    Each missing stub goes to a node drawn uniformly with replacement.
    Degrees may end up above the range of the law they came from.
    """
    if seq.n == 0:
        raise ValueError("empty degree sequence")
    diff = int(seq.in_deg.sum()) - int(seq.out_deg.sum())
    if diff == 0:
        return seq
    rng = make_rng(seed)
    targets = rng.integers(0, seq.n, size=abs(diff))
    if diff > 0:
        out = seq.out_deg.copy()
        np.add.at(out, targets, 1)
        return DegreeSequence(seq.in_deg, out)
    ind = seq.in_deg.copy()
    np.add.at(ind, targets, 1)
    return DegreeSequence(ind, seq.out_deg)


def empirical_pmf(seq: DegreeSequence) -> JointDegreePMF:
    """Class frequencies of a degree sequence."""
    if np.any((seq.in_deg == 0) & (seq.out_deg == 0)):
        raise ValueError("sequence contains an isolated (0, 0) node")
    pairs, counts = np.unique(
        np.stack([seq.in_deg, seq.out_deg], axis=1), axis=0, return_counts=True
    )
    return JointDegreePMF(pairs[:, 0], pairs[:, 1], counts / seq.n)
