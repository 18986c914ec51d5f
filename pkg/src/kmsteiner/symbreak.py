"""Normalizer-induced symmetry breaking.

The normalizer N of the prescribed group G permutes the good k-orbits;
orbits in the same N-class lead to isomorphic designs, so the choice of a
"first" orbit can be restricted to one representative per class.  Three
encodings of the Kramer-Mesner instance are emitted:

  a) plain exact cover, one option per good orbit;
  b) as a), plus an extra primary item and one copy-option per class
     representative covering it, forcing every solution to contain a
     representative;
  c) as b), plus colored secondary items, one per class except the last:
     options of class i carry the class item with color 1, and the
     copy-option of representative j carries the items of all earlier
     classes with color 0, discarding those classes once j is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .km import KMInstance
from .orbitgen import GoodOrbitSet
from .perm import PermutationGroup, verify_normalizes
from .xcc import Solution, XCCProblem

__all__ = [
    "NormalizerClasses",
    "Encoding",
    "normalizer_classes",
    "encode",
    "decode_solution",
    "write_copy_map",
    "read_copy_map",
]


@dataclass
class NormalizerClasses:
    class_of: np.ndarray  # k-orbit index -> class id
    reps: list  # one k-orbit index per class; ascending, defines class order

    @property
    def n_classes(self) -> int:
        return len(self.reps)


def _pack_keys(subsets0: np.ndarray, v: int) -> np.ndarray:
    """Pack sorted 0-based subsets (m, k) into int64 keys preserving lex order."""
    bits = max(1, (v - 1).bit_length())
    k = subsets0.shape[1]
    if bits * k > 62:
        raise ValueError("subset too wide to pack")
    keys = np.zeros(len(subsets0), dtype=np.int64)
    for col in range(k):
        keys = (keys << bits) | subsets0[:, col].astype(np.int64)
    return keys


def _canonical_keys(subsets0: np.ndarray, g_images: np.ndarray, v: int) -> np.ndarray:
    """Lex-minimal representative keys for each subset under all group elements."""
    best = None
    for e in range(g_images.shape[0]):
        img = np.sort(g_images[e][subsets0], axis=1)
        keys = _pack_keys(img, v)
        best = keys if best is None else np.minimum(best, keys)
    return best


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def normalizer_classes(
    N: PermutationGroup, k_orbits: GoodOrbitSet, G: PermutationGroup
) -> NormalizerClasses:
    """Partition good k-orbits into N-classes.

    Applies each generator of N to each representative, re-canonicalizes
    under G and merges via union-find.  An image orbit missing from the
    good set means N does not normalize G (or the orbit set is stale) and
    is a hard failure.
    """
    if not verify_normalizes(N, G):
        raise ValueError("N does not normalize G")
    if k_orbits.group_id != G.fingerprint():
        raise ValueError("k_orbits were generated under a different group")
    v = k_orbits.v
    n = len(k_orbits.reps)
    reps0 = np.array([r.rep for r in k_orbits.reps], dtype=np.int64) - 1
    rep_keys = _pack_keys(reps0, v)  # ascending since reps are in lex order
    g_images = np.array(G.raw_elements(), dtype=np.int64)
    uf = _UnionFind(n)
    chunk = 65536
    for pi in N.generators:
        table = np.array(pi.raw(), dtype=np.int64)
        for lo in range(0, n, chunk):
            part = reps0[lo : lo + chunk]
            imgs = np.sort(table[part], axis=1)
            keys = _canonical_keys(imgs, g_images, v)
            idx = np.searchsorted(rep_keys, keys)
            ok = (idx < n) & (rep_keys[np.minimum(idx, n - 1)] == keys)
            if not ok.all():
                bad = int(np.flatnonzero(~ok)[0]) + lo
                raise RuntimeError(
                    f"image of good orbit {bad} under a normalizer generator "
                    "is not a good orbit: N-closure violated"
                )
            for j, target in enumerate(idx):
                uf.union(lo + j, int(target))
    roots = np.array([uf.find(j) for j in range(n)], dtype=np.int64)
    rep_list = sorted(set(int(r) for r in roots))
    class_id = {r: c for c, r in enumerate(rep_list)}
    class_of = np.array([class_id[int(r)] for r in roots], dtype=np.int64)
    return NormalizerClasses(class_of=class_of, reps=rep_list)


@dataclass
class Encoding:
    kind: str
    problem: XCCProblem
    copy_map: dict  # copy-option id -> original k-orbit index


def encode(
    km: KMInstance, classes: NormalizerClasses | None, kind: str
) -> Encoding:
    """Emit the chosen encoding of a Kramer-Mesner instance as XCC."""
    if kind not in ("a", "b", "c"):
        raise ValueError(f"unknown encoding kind {kind!r}")
    if kind in ("b", "c") and classes is None:
        raise ValueError(f"encoding {kind!r} requires normalizer classes")
    m, n = km.shape
    primary = [f"r{i}" for i in range(m)]
    if kind in ("b", "c"):
        primary.append("Nhit")
    nhit = m
    n_classes = classes.n_classes if classes is not None else 0
    secondary = [f"s{c}" for c in range(n_classes - 1)] if kind == "c" else []
    problem = XCCProblem(primary, secondary)
    copy_map: dict = {}
    class_of = classes.class_of if classes is not None else None
    for j in range(n):
        col = km.column(j)
        sec = ()
        if kind == "c":
            c = int(class_of[j])
            if c < n_classes - 1:
                sec = ((c, 1),)
        problem.add_option(col, sec)
    if kind in ("b", "c"):
        for r in classes.reps:
            col = km.column(r) + (nhit,)
            sec: tuple = ()
            if kind == "c":
                c = int(class_of[r])
                pairs = [(i, 0) for i in range(c)]
                if c < n_classes - 1:
                    pairs.append((c, 1))
                sec = tuple(pairs)
            oid = problem.add_option(col, sec)
            copy_map[oid] = r
    return Encoding(kind=kind, problem=problem, copy_map=copy_map)


def decode_solution(sol: Solution, enc: Encoding) -> set:
    """Replace copy-options by their original k-orbit indices, deduplicated."""
    out = set()
    for oid in sol.option_ids:
        out.add(enc.copy_map.get(oid, oid))
    return out


# ---------------------------------------------------------------------------
# copy map persistence: "copy <option_id> = orbit <j>" lines


def write_copy_map(path, copy_map: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for oid in sorted(copy_map):
            fh.write(f"copy {oid} = orbit {copy_map[oid]}\n")


def read_copy_map(path) -> dict:
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            toks = line.split()
            if not toks:
                continue
            if len(toks) != 5 or toks[0] != "copy" or toks[2] != "=" or toks[3] != "orbit":
                raise ValueError(f"{path}: malformed copy map line {ln}")
            out[int(toks[1])] = int(toks[4])
    return out
