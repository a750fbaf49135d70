"""Binary linear codes: GF(2) linear algebra, eBCH construction, encoding.

Generator matrices are kept as ``uint8`` arrays of shape ``(k, n)``. The
numba kernels in :mod:`noma_osd._kernels` repack them into 64-bit words.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

# Conventional primitive polynomials, bit i = coefficient of x^i.
PRIMITIVE_POLYS = {
    3: 0b1011,  # x^3 + x + 1
    6: 0b1000011,  # x^6 + x + 1
}

# (n, k) -> minimum distance of the extended narrow-sense BCH code
SUPPORTED_EBCH = {
    (8, 4): 4,
    (64, 16): 24,
    (64, 24): 16,
    (64, 30): 14,
    (64, 36): 12,
}


class CodeError(ValueError):
    """Raised for malformed or unsupported codes."""


@dataclass(frozen=True, eq=False)
class Code:
    """Binary linear code C(n, k) given by a full-rank generator matrix."""

    n: int
    k: int
    G: np.ndarray
    d_min: Optional[int] = None
    name: str = ""
    info_set: np.ndarray = field(init=False, repr=False)
    _decoder_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        G = np.ascontiguousarray(self.G, dtype=np.uint8)
        if G.shape != (self.k, self.n):
            raise CodeError(f"G has shape {G.shape}, expected ({self.k}, {self.n})")
        if not 1 <= self.k < self.n:
            raise CodeError(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        if np.any(G > 1):
            raise CodeError("G must be binary")
        info, inv = _information_set(G)
        G.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "info_set", info)
        object.__setattr__(self, "_decoder_inv", inv)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def __repr__(self):
        label = self.name or "Code"
        return f"{label}(n={self.n}, k={self.k}, d_min={self.d_min})"

    def unencode(self, c: np.ndarray) -> np.ndarray:
        """Recover the information word b of a codeword c = bG.

        Works on a single codeword or a stack of them (last axis = n).
        """
        c = np.asarray(c, dtype=np.uint8)
        sub = c[..., self.info_set]
        return (sub.astype(np.int64) @ self._decoder_inv % 2).astype(np.uint8)

    def codebook(self) -> np.ndarray:
        """All 2^k codewords, row i is the encoding of the binary expansion of i."""
        if self.k > 24:
            raise CodeError(f"refusing to enumerate 2^{self.k} codewords")
        msgs = info_words(self.k)
        return (msgs.astype(np.int64) @ self.G % 2).astype(np.uint8)


def info_words(k: int) -> np.ndarray:
    """All 2^k binary words, row i holds i with bit 0 first (little endian)."""
    idx = np.arange(1 << k, dtype=np.int64)
    return ((idx[:, None] >> np.arange(k)) & 1).astype(np.uint8)


def gf2_rank(M: np.ndarray) -> int:
    M = np.array(M, dtype=np.uint8) % 2
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = np.nonzero(M[r:, c])[0]
        if piv.size == 0:
            continue
        p = r + piv[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        hit = np.nonzero(M[:, c])[0]
        hit = hit[hit != r]
        M[hit] ^= M[r]
        r += 1
    return r


def gf2_inv(A: np.ndarray) -> np.ndarray:
    """Inverse of a square binary matrix over GF(2)."""
    k = A.shape[0]
    aug = np.concatenate([np.array(A, dtype=np.uint8) % 2, np.eye(k, dtype=np.uint8)], axis=1)
    for c in range(k):
        piv = np.nonzero(aug[c:, c])[0]
        if piv.size == 0:
            raise CodeError("matrix is singular over GF(2)")
        p = c + piv[0]
        if p != c:
            aug[[c, p]] = aug[[p, c]]
        hit = np.nonzero(aug[:, c])[0]
        hit = hit[hit != c]
        aug[hit] ^= aug[c]
    return aug[:, k:]


def _information_set(G: np.ndarray):
    """First k independent columns of G and the inverse of that submatrix."""
    k, n = G.shape
    sys = gaussian_eliminate(G)
    info = np.sort(sys.pi2[:k])
    return info, gf2_inv(G[:, info])


@dataclass(frozen=True, eq=False)
class SystematicForm:
    """Row-reduced matrix G_tilde = [I_k | P] of ``Gp[:, pi2]``.

    ``pi2`` is an index array: column j of G_tilde comes from column
    ``pi2[j]`` of the input matrix.
    """

    G_tilde: np.ndarray
    pi2: np.ndarray

    @property
    def P(self) -> np.ndarray:
        k = self.G_tilde.shape[0]
        return self.G_tilde[:, k:]


def gaussian_eliminate(Gp: np.ndarray) -> SystematicForm:
    """Bring a full-rank k x n binary matrix to systematic form.

    Columns are visited left to right. When column j has no pivot left,
    it is swapped with the nearest later column that does; otherwise no
    column moves and ``pi2`` stays the identity.

    Raises
    ------
    CodeError
        If the matrix has rank below k.
    """
    M = np.array(Gp, dtype=np.uint8)
    k, n = M.shape
    pi2 = np.arange(n)
    for r in range(k):
        j = r
        while j < n and not M[r:, j].any():
            j += 1
        if j == n:
            raise CodeError(f"rank deficient: only {r} independent rows of {k}")
        if j != r:
            M[:, [r, j]] = M[:, [j, r]]
            pi2[[r, j]] = pi2[[j, r]]
        p = r + int(np.argmax(M[r:, r]))
        if p != r:
            M[[r, p]] = M[[p, r]]
        hit = np.nonzero(M[:, r])[0]
        hit = hit[hit != r]
        M[hit] ^= M[r]
    return SystematicForm(G_tilde=M, pi2=pi2)


def encode(code: Code, b) -> np.ndarray:
    """c = bG over GF(2). Accepts one word of length k or a (..., k) stack."""
    b = np.asarray(b, dtype=np.uint8)
    if b.shape[-1] != code.k:
        raise CodeError(f"information word length {b.shape[-1]} != k={code.k}")
    return (b.astype(np.int64) @ code.G % 2).astype(np.uint8)


def min_distance(code: Code) -> int:
    """Minimum nonzero codeword weight by exhaustive enumeration."""
    book = code.codebook()
    w = book.sum(axis=1)
    return int(w[1:].min())


# --- eBCH construction -------------------------------------------------------

def _gf_tables(m: int):
    poly = PRIMITIVE_POLYS[m]
    size = 1 << m
    exp = np.zeros(2 * size, dtype=np.int64)
    log = np.zeros(size, dtype=np.int64)
    x = 1
    for i in range(size - 1):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & size:
            x ^= poly
    exp[size - 1:] = exp[: size + 1]
    return exp, log


def _minimal_poly(i: int, m: int, exp, log) -> int:
    """Minimal polynomial of alpha^i over GF(2), returned as an int bitmask."""
    order = (1 << m) - 1
    coset = sorted({(i * (1 << s)) % order for s in range(m)})

    def gmul(a, b):
        if a == 0 or b == 0:
            return 0
        return int(exp[(log[a] + log[b]) % order])

    coeffs = [1]  # coefficients in GF(2^m), lowest degree first
    for c in coset:
        root = int(exp[c])
        nxt = [0] * (len(coeffs) + 1)
        for d, a in enumerate(coeffs):
            nxt[d + 1] ^= a
            nxt[d] ^= gmul(a, root)
        coeffs = nxt
    if any(a > 1 for a in coeffs):
        raise AssertionError("minimal polynomial must be binary")
    return sum(a << d for d, a in enumerate(coeffs))


def _poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def bch_generator_poly(n: int, k: int) -> int:
    """Generator polynomial of the narrow-sense primitive BCH(n, k) code."""
    m = (n + 1).bit_length() - 1
    if (1 << m) - 1 != n or m not in PRIMITIVE_POLYS:
        raise CodeError(f"no primitive polynomial configured for length {n}")
    exp, log = _gf_tables(m)
    order = n
    g, seen = 1, set()
    for i in range(1, n):
        rep = min((i * (1 << s)) % order for s in range(m))
        if rep not in seen:
            seen.add(rep)
            g = _poly_mul(g, _minimal_poly(rep, m, exp, log))
        deg = g.bit_length() - 1
        if deg == n - k:
            return g
        if deg > n - k:
            break
    raise CodeError(f"BCH({n},{k}) is not a narrow-sense BCH dimension")


def build_ebch(n: int, k: int) -> Code:
    """Extended narrow-sense BCH code with an overall even-parity bit.

    The generator matrix is returned in systematic form ``[I_k | P]``.
    """
    if (n, k) not in SUPPORTED_EBCH:
        raise CodeError(
            f"code ({n},{k}) not built-in; supported: {sorted(SUPPORTED_EBCH)}. "
            "Use load_code() for other generator matrices."
        )
    g = bch_generator_poly(n - 1, k)
    gbits = np.array([(g >> d) & 1 for d in range(n - k)], dtype=np.uint8)
    G = np.zeros((k, n), dtype=np.uint8)
    for r in range(k):
        G[r, r : r + len(gbits)] = gbits
    G[:, n - 1] = G[:, : n - 1].sum(axis=1) % 2
    G = gaussian_eliminate(G).G_tilde
    return Code(n=n, k=k, G=G, d_min=SUPPORTED_EBCH[(n, k)], name=f"eBCH({n},{k})")


def parse_code_name(name: str) -> Code:
    """Resolve ``"8,4"``, ``"ebch64_16"``, ``"(64,16)"`` style names."""
    digits = [int(t) for t in "".join(ch if ch.isdigit() else " " for ch in name).split()]
    if len(digits) != 2:
        raise CodeError(f"cannot parse code name {name!r}")
    return build_ebch(*digits)


def resolve_code(spec: str) -> Code:
    """Built-in code name or path to a generator-matrix file."""
    path = Path(spec)
    if path.is_file():
        return load_code(path)
    return parse_code_name(spec)


# --- text format -------------------------------------------------------------

def save_code(code: Code, path) -> None:
    header = f"{code.n} {code.k}" + (f" {code.d_min}" if code.d_min is not None else "")
    rows = ["".join("1" if b else "0" for b in row) for row in code.G]
    Path(path).write_text("\n".join([header, *rows]) + "\n", encoding="ascii")


def load_code(path) -> Code:
    """Read a generator matrix: header ``n k [d_min]`` then k rows of '0'/'1'."""
    lines = [ln.strip() for ln in Path(path).read_text(encoding="ascii").splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise CodeError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) not in (2, 3) or not all(t.isdigit() for t in head):
        raise CodeError(f"{path}: bad header {lines[0]!r}, expected 'n k [d_min]'")
    n, k = int(head[0]), int(head[1])
    d_min = int(head[2]) if len(head) == 3 else None
    body = lines[1:]
    if len(body) != k:
        raise CodeError(f"{path}: expected {k} matrix rows, found {len(body)}")
    G = np.zeros((k, n), dtype=np.uint8)
    for r, row in enumerate(body):
        if len(row) != n or set(row) - {"0", "1"}:
            raise CodeError(f"{path}: row {r + 1} must be {n} characters of 0/1: {row!r}")
        G[r] = [ch == "1" for ch in row]
    for r in range(1, k + 1):
        if gf2_rank(G[:r]) < r:
            raise CodeError(f"{path}: row {r} is linearly dependent on earlier rows (rank deficient G)")
    return Code(n=n, k=k, G=G, d_min=d_min, name=Path(path).stem)


def weight_spectrum(code: Code) -> dict:
    w = code.codebook().sum(axis=1)
    vals, counts = np.unique(w, return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


__all__ = [
    "Code",
    "CodeError",
    "SystematicForm",
    "build_ebch",
    "load_code",
    "save_code",
    "encode",
    "gaussian_eliminate",
    "gf2_rank",
    "min_distance",
    "resolve_code",
    "weight_spectrum",
]
