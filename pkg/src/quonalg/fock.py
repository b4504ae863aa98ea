"""Dense matrix model of the (q, m)-Fock space on truncated tensor levels.

Level ``n`` is the raw tensor power of ``C^d`` with row-major multi-index
ordering (slot 1 outermost); the vacuum is level 0. The quotient by null
vectors of the twisted inner product is never formed: every identity is
checked on raw tensors, and degenerate directions only matter inside
:func:`operator_norm`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Mapping, Sequence

import numpy as np

from .combinatorics import CapExceededError, inversion_count
from .symbolic import Kind, NormalForm, Word

IDENTITY_TOL = 1e-10
SPECTRAL_TOL = 1e-6
KERNEL_CUTOFF = 1e-10
PSD_TOL = 1e-8
MAX_DIM = 4
MAX_LEVELS = 6


@dataclass(frozen=True)
class FockConfig:
    q: float
    m: int | None  # None means unbounded
    d: int
    n_max: int

    def __post_init__(self):
        if not -1.0 <= self.q <= 1.0:
            raise ValueError(f"q must lie in [-1, 1], got {self.q}")
        if self.m is not None and self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.d < 1 or self.n_max < 0:
            raise ValueError(f"need d >= 1 and n_max >= 0, got d={self.d}, n_max={self.n_max}")
        if self.d > MAX_DIM or self.n_max > MAX_LEVELS:
            raise CapExceededError(
                f"d={self.d}, n_max={self.n_max} exceeds caps d<={MAX_DIM}, n_max<={MAX_LEVELS}")

    @property
    def m_eff(self) -> int:
        return self.n_max + 1 if self.m is None else self.m

    def dim(self, n: int) -> int:
        return self.d ** n


@dataclass(frozen=True)
class LevelOperator:
    from_level: int
    to_level: int
    matrix: np.ndarray

    def __matmul__(self, other: "LevelOperator") -> "LevelOperator":
        if other.to_level != self.from_level:
            raise ValueError(f"cannot compose level {other.to_level} into {self.from_level}")
        return LevelOperator(other.from_level, self.to_level, self.matrix @ other.matrix)


def _check_level(cfg: FockConfig, n: int) -> None:
    if not 0 <= n <= cfg.n_max:
        raise ValueError(f"level {n} outside 0..{cfg.n_max}")


def _basis_tensor(d: int, n: int) -> np.ndarray:
    dim = d ** n
    return np.eye(dim, dtype=complex).reshape((d,) * n + (dim,))


@lru_cache(maxsize=None)
def _q_symmetrizer(q: float, d: int, n: int) -> np.ndarray:
    if n == 0:
        return np.ones((1, 1), dtype=complex)
    E = _basis_tensor(d, n)
    dim = d ** n
    out = np.zeros((dim, dim), dtype=complex)
    for sigma in permutations(range(1, n + 1)):
        weight = q ** inversion_count(sigma)
        if weight == 0:
            continue
        # output slot a carries input slot sigma(a)
        axes = [s - 1 for s in sigma] + [n]
        out += weight * E.transpose(axes).reshape(dim, dim)
    return out


def symmetrizer(cfg: FockConfig, n: int) -> LevelOperator:
    """The interaction ``lambda_n``; identity on leading slots beyond ``m``."""
    _check_level(cfg, n)
    m = cfg.m_eff
    if n <= m:
        mat = _q_symmetrizer(cfg.q, cfg.d, n)
    else:
        mat = np.kron(np.eye(cfg.d ** (n - m)), _q_symmetrizer(cfg.q, cfg.d, m))
    return LevelOperator(n, n, mat)


def inner_product(cfg: FockConfig, n: int, x: np.ndarray, y: np.ndarray) -> complex:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != (cfg.dim(n),) or y.shape != (cfg.dim(n),):
        raise ValueError(f"vectors do not live on level {n}")
    return complex(np.vdot(x, symmetrizer(cfg, n).matrix @ y))


def _vector(cfg: FockConfig, f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape != (cfg.d,):
        raise ValueError(f"one-particle vector must have length {cfg.d}")
    return f


def creation_matrix(cfg: FockConfig, f, n: int) -> LevelOperator:
    """``x -> f (x) x`` from level ``n`` to ``n + 1``."""
    f = _vector(cfg, f)
    _check_level(cfg, n + 1)
    _check_level(cfg, n)
    return LevelOperator(n, n + 1, np.kron(f[:, None], np.eye(cfg.dim(n))))


def annihilation_matrix(cfg: FockConfig, f, n: int) -> LevelOperator:
    """The (q, m)-annihilator from level ``n >= 1`` to ``n - 1``."""
    f = _vector(cfg, f)
    if n < 1:
        raise ValueError("the annihilator has no level-0 matrix (it kills the vacuum)")
    _check_level(cfg, n)
    E = _basis_tensor(cfg.d, n)
    slots = range(1, n + 1) if n < cfg.m_eff + 1 else range(1, 2)
    mat = np.zeros((cfg.dim(n - 1), cfg.dim(n)), dtype=complex)
    for k in slots:
        contracted = np.tensordot(f.conj(), E, axes=([0], [k - 1]))
        mat += cfg.q ** (k - 1) * contracted.reshape(cfg.dim(n - 1), cfg.dim(n))
    return LevelOperator(n, n - 1, mat)


def projector_passes(k: int | None, level: int) -> bool:
    """Whether ``P_[0,k)`` acts as the identity on ``level`` (``None``: always)."""
    return k is None or level < k


def level_projector(cfg: FockConfig, k: int) -> dict[int, LevelOperator]:
    """``P_[0,k)`` as one diagonal block per level; zero for ``k <= 0``."""
    out = {}
    for n in range(cfg.n_max + 1):
        dim = cfg.dim(n)
        mat = np.eye(dim, dtype=complex) if projector_passes(k, n) else np.zeros((dim, dim), dtype=complex)
        out[n] = LevelOperator(n, n, mat)
    return out


# -- verification -------------------------------------------------------------

def _random_unit(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def relation_residuals(cfg: FockConfig, f, g) -> dict[str, float]:
    """Max residuals of adjointness, both commutation relations and PSD-ness."""
    f = _vector(cfg, f)
    g = _vector(cfg, g)
    m = cfg.m_eff
    fg = complex(np.vdot(f, g))
    adj = comm = proj = 0.0
    for n in range(1, cfg.n_max + 1):
        lhs = symmetrizer(cfg, n - 1).matrix @ annihilation_matrix(cfg, f, n).matrix
        rhs = creation_matrix(cfg, f, n - 1).matrix.conj().T @ symmetrizer(cfg, n).matrix
        adj = max(adj, float(np.abs(lhs - rhs).max()))
    for n in range(0, cfg.n_max):
        aa = annihilation_matrix(cfg, f, n + 1).matrix @ creation_matrix(cfg, g, n).matrix
        if n >= 1 and n < m:
            aa = aa - cfg.q * (creation_matrix(cfg, g, n - 1).matrix
                               @ annihilation_matrix(cfg, f, n).matrix)
        comm = max(comm, float(np.abs(aa - fg * np.eye(cfg.dim(n))).max()))
    for k in range(0, cfg.n_max + 1):
        for n in range(1, cfg.n_max + 1):
            a = annihilation_matrix(cfg, f, n).matrix
            lhs = a * float(projector_passes(k + 1, n))
            rhs = float(projector_passes(k, n - 1)) * a
            proj = max(proj, float(np.abs(lhs - rhs).max()))
    min_eig = min(
        float(np.linalg.eigvalsh(symmetrizer(cfg, n).matrix).min())
        for n in range(1, cfg.n_max + 1)
    ) if cfg.n_max >= 1 else 1.0
    return {"adjointness": adj, "first_relation": comm, "second_relation": proj,
            "min_eigenvalue": min_eig}


def verify_relations(cfg: FockConfig, samples: int = 3, seed: int = 0) -> dict:
    """Relation residuals maximized over random unit test vectors."""
    rng = np.random.default_rng(seed)
    worst = {"adjointness": 0.0, "first_relation": 0.0, "second_relation": 0.0,
             "min_eigenvalue": math.inf}
    for _ in range(samples):
        r = relation_residuals(cfg, _random_unit(rng, cfg.d), _random_unit(rng, cfg.d))
        for key in ("adjointness", "first_relation", "second_relation"):
            worst[key] = max(worst[key], r[key])
        worst["min_eigenvalue"] = min(worst["min_eigenvalue"], r["min_eigenvalue"])
    max_residual = max(worst["adjointness"], worst["first_relation"], worst["second_relation"])
    ok = max_residual <= IDENTITY_TOL and worst["min_eigenvalue"] >= -PSD_TOL
    return {
        "suite": "fock-relations",
        "grid": {"q": cfg.q, "m": cfg.m, "d": cfg.d, "n_max": cfg.n_max, "samples": samples},
        "max_residual": max_residual,
        "pass": bool(ok),
        "details": worst,
        "tolerance": {"identity": IDENTITY_TOL, "psd": PSD_TOL},
    }


def operator_norm(cfg: FockConfig, f) -> float:
    """Norm of ``A+(f)`` for the twisted inner products, sup over built levels."""
    f = _vector(cfg, f)
    if cfg.m is not None and cfg.n_max < cfg.m + 1:
        raise ValueError(f"n_max={cfg.n_max} must be at least m+1={cfg.m + 1}")
    best = 0.0
    for n in range(cfg.n_max):
        lam = symmetrizer(cfg, n).matrix
        w, U = np.linalg.eigh(lam)
        keep = w > KERNEL_CUTOFF
        if not keep.any():
            continue
        T = U[:, keep] / np.sqrt(w[keep])
        C = creation_matrix(cfg, f, n).matrix
        G = C.conj().T @ symmetrizer(cfg, n + 1).matrix @ C
        top = float(np.linalg.eigvalsh(T.conj().T @ G @ T).max())
        best = max(best, top)
    return math.sqrt(max(best, 0.0))


def expected_norm(q: float, m: int, f_norm: float = 1.0) -> float:
    if q < 0:
        return f_norm
    return f_norm * math.sqrt(sum(q ** j for j in range(m)))


def field_moments(cfg: FockConfig, f, max_order: int) -> list[float]:
    """``<Phi, (A(f) + A+(f))^k Phi>`` for ``k = 1..max_order``."""
    f = _vector(cfg, f)
    if max_order > 2 * cfg.n_max:
        raise ValueError(f"order {max_order} exceeds 2*n_max={2 * cfg.n_max}")
    create = {n: creation_matrix(cfg, f, n).matrix for n in range(cfg.n_max)}
    kill = {n: annihilation_matrix(cfg, f, n).matrix for n in range(1, cfg.n_max + 1)}
    state = {0: np.ones(1, dtype=complex)}
    moments = []
    for _ in range(max_order):
        nxt: dict[int, np.ndarray] = {}
        for n, v in state.items():
            if n < cfg.n_max:
                nxt[n + 1] = nxt.get(n + 1, 0) + create[n] @ v
            if n >= 1:
                nxt[n - 1] = nxt.get(n - 1, 0) + kill[n] @ v
        state = nxt
        moments.append(float(state[0][0].real) if 0 in state else 0.0)
    return moments


# -- bridge to the symbolic engines -------------------------------------------

def _full_dim(cfg: FockConfig) -> int:
    return sum(cfg.dim(n) for n in range(cfg.n_max + 1))


def _offsets(cfg: FockConfig) -> list[int]:
    out, acc = [], 0
    for n in range(cfg.n_max + 1):
        out.append(acc)
        acc += cfg.dim(n)
    return out


def _embed_full(cfg: FockConfig, blocks: Sequence[LevelOperator]) -> np.ndarray:
    off = _offsets(cfg)
    D = _full_dim(cfg)
    out = np.zeros((D, D), dtype=complex)
    for b in blocks:
        r, c = off[b.to_level], off[b.from_level]
        out[r:r + cfg.dim(b.to_level), c:c + cfg.dim(b.from_level)] = b.matrix
    return out


def full_creation(cfg: FockConfig, f) -> np.ndarray:
    """``A+(f)`` on the truncated space; the top level is sent to zero."""
    return _embed_full(cfg, [creation_matrix(cfg, f, n) for n in range(cfg.n_max)])


def full_annihilation(cfg: FockConfig, f) -> np.ndarray:
    return _embed_full(cfg, [annihilation_matrix(cfg, f, n) for n in range(1, cfg.n_max + 1)])


def full_projector(cfg: FockConfig, k: int | None) -> np.ndarray:
    diag = np.concatenate([
        np.full(cfg.dim(n), 1.0 if projector_passes(k, n) else 0.0)
        for n in range(cfg.n_max + 1)
    ])
    return np.diag(diag).astype(complex)


def _lookup(assignment: Mapping[str, np.ndarray], label: str) -> np.ndarray:
    try:
        return assignment[label]
    except KeyError:
        raise KeyError(f"no vector assigned to label {label!r}") from None


def apply_word(cfg: FockConfig, word: Word, assignment: Mapping[str, np.ndarray]) -> np.ndarray:
    """Direct product of the word's factors on the truncated space."""
    _require_m(cfg, word.m)
    D = _full_dim(cfg)
    out = np.eye(D, dtype=complex)
    for op in word.factors:
        if op.kind is Kind.CREATOR:
            mat = full_creation(cfg, _lookup(assignment, op.label))
        elif op.kind is Kind.ANNIHILATOR:
            mat = full_annihilation(cfg, _lookup(assignment, op.label))
        else:
            mat = full_projector(cfg, op.level)
        out = out @ mat
    return out


def evaluate_normal_form(cfg: FockConfig, nf: NormalForm,
                         assignment: Mapping[str, np.ndarray]) -> np.ndarray:
    """Realize a symbolic normal form with numeric ``q``, pairings and projectors."""
    if nf.m is not None:
        _require_m(cfg, nf.m)
    core = nf.core
    D = _full_dim(cfg)
    total = np.zeros((D, D), dtype=complex)
    for t in nf:
        scalar = t.coeff * cfg.q ** t.q_exp
        for a, c in t.pairings:
            scalar *= complex(np.vdot(_lookup(assignment, core[a - 1].label),
                                      _lookup(assignment, core[c - 1].label)))
        if scalar == 0:
            continue
        mat = full_projector(cfg, t.level) if nf.m is not None else np.eye(D, dtype=complex)
        for pos in t.creators:
            mat = mat @ full_creation(cfg, _lookup(assignment, core[pos - 1].label))
        for pos in t.annihilators:
            mat = mat @ full_annihilation(cfg, _lookup(assignment, core[pos - 1].label))
        total += scalar * mat
    return total


def _require_m(cfg: FockConfig, m: int) -> None:
    if cfg.m is not None and cfg.m != m:
        raise ValueError(f"config has m={cfg.m} but the word uses m={m}")


def trusted_columns(cfg: FockConfig, word: Word) -> np.ndarray:
    """Columns whose input level keeps the word's path within ``n_max``."""
    height = peak = 0
    for op in reversed(word.factors):
        height += op.sign
        peak = max(peak, height)
    mask = []
    for n in range(cfg.n_max + 1):
        mask.extend([n + peak <= cfg.n_max] * cfg.dim(n))
    return np.array(mask, dtype=bool)


def crosscheck_word(cfg: FockConfig, word: Word, nf: NormalForm,
                    assignment: Mapping[str, np.ndarray]) -> float:
    """Max discrepancy between a normal form and direct application of ``word``."""
    cols = trusted_columns(cfg, word)
    direct = apply_word(cfg, word, assignment)[:, cols]
    symbolic = evaluate_normal_form(cfg, nf, assignment)[:, cols]
    return float(np.abs(direct - symbolic).max()) if cols.any() else 0.0


# -- grid sweeps --------------------------------------------------------------

GRID_Q = (-1.0, -0.5, 0.0, 0.5, 1.0)
GRID_M = (1, 2, 3)
GRID_D = (2, 3)


def verify_relation_grid(qs=GRID_Q, ms=GRID_M, ds=GRID_D, n_max: int = 4,
                         samples: int = 3, seed: int = 0) -> dict:
    """:func:`verify_relations` over a parameter grid, worst case reported."""
    failures = []
    worst = 0.0
    min_eig = math.inf
    for q in qs:
        for m in ms:
            for d in ds:
                r = verify_relations(FockConfig(q, m, d, n_max), samples, seed)
                worst = max(worst, r["max_residual"])
                min_eig = min(min_eig, r["details"]["min_eigenvalue"])
                if not r["pass"]:
                    failures.append(r["grid"])
    return {
        "suite": "fock-relations",
        "grid": {"q": list(qs), "m": list(ms), "d": list(ds), "n_max": n_max},
        "max_residual": worst,
        "min_eigenvalue": min_eig,
        "pass": not failures,
        "failures": failures,
    }


def verify_norm_grid(qs=GRID_Q, ms=GRID_M, ds=GRID_D, seed: int = 0) -> dict:
    """Relative error of :func:`operator_norm` against :func:`expected_norm`."""
    rng = np.random.default_rng(seed)
    failures = []
    worst = 0.0
    for q in qs:
        for m in ms:
            for d in ds:
                f = rng.normal(size=d) + 1j * rng.normal(size=d)
                got = operator_norm(FockConfig(q, m, d, m + 2), f)
                want = expected_norm(q, m, float(np.linalg.norm(f)))
                rel = abs(got - want) / want
                worst = max(worst, rel)
                if rel > SPECTRAL_TOL:
                    failures.append({"q": q, "m": m, "d": d, "got": got, "want": want})
    return {
        "suite": "fock-norm",
        "grid": {"q": list(qs), "m": list(ms), "d": list(ds), "n_max": "m+2"},
        "max_residual": worst,
        "pass": not failures,
        "failures": failures,
    }


def verify_bridge(cases: int = 200, max_len: int = 6, d: int = 2, n_max: int = 4,
                  ms: Sequence[int] = (1, 2, 3), q: float | None = None,
                  seed: int = 0, tol: float = 1e-9) -> dict:
    """Symbolic normal forms against direct matrix products on random words."""
    import random

    from .symbolic import normal_order_wick, random_word

    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    worst = 0.0
    vacuous = 0
    failures = []
    for i in range(cases):
        m = ms[i % len(ms)]
        qv = q if q is not None else rng.choice(GRID_Q)
        cfg = FockConfig(qv, m, d, n_max)
        word = random_word(rng, rng.randint(1, max_len), m, level_range=(-1, m + 3))
        labels = {op.label for op in word.operators}
        assignment = {lab: nrng.normal(size=d) + 1j * nrng.normal(size=d) for lab in labels}
        if not trusted_columns(cfg, word).any():
            vacuous += 1
            continue
        err = crosscheck_word(cfg, word, normal_order_wick(word), assignment)
        worst = max(worst, err)
        if err > tol:
            failures.append({"word": str(word), "q": qv, "m": m, "error": err})
    return {
        "suite": "bridge",
        "grid": {"cases": cases, "max_len": max_len, "d": d, "n_max": n_max,
                 "m": list(ms), "seed": seed, "vacuous": vacuous},
        "max_residual": worst,
        "pass": not failures,
        "failures": failures,
    }
