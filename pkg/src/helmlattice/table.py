"""Field tables: lattice values plus the metadata needed to reproduce them."""

from dataclasses import dataclass, field
import json

import numpy as np


def _fmt(v):
    return format(float(v), ".16e")


@dataclass
class FieldTable:
    """Complex field values on a set of lattice nodes.

    ``meta`` carries the method name, ``K``, ``phi_in`` and the numerical
    parameters.  Residual entries are recomputed from the values whenever the
    table is written, so a file always describes itself.
    """

    values: dict = field(default_factory=dict)   # (m, n) -> complex
    meta: dict = field(default_factory=dict)

    def __getitem__(self, mn):
        return self.values[mn]

    def __contains__(self, mn):
        return mn in self.values

    def __len__(self):
        return len(self.values)

    def nodes(self):
        return sorted(self.values)

    def get(self, m, n, default=None):
        return self.values.get((m, n), default)

    def max_abs_diff(self, other, nodes=None):
        nodes = self.nodes() if nodes is None else nodes
        return max(abs(self.values[k] - other.values[k]) for k in nodes)

    def stencil_residuals(self, kappa, rhs=None, skip=None):
        """Five-point residual at every node whose four neighbours are present.

        ``rhs(m, n)`` is subtracted (defaults to zero); nodes for which
        ``skip(m, n)`` is true are left out.
        """
        out = {}
        v = self.values
        for (m, n), u in v.items():
            nb = [(m + 1, n), (m - 1, n), (m, n + 1), (m, n - 1)]
            if not all(k in v for k in nb):
                continue
            if skip is not None and skip(m, n):
                continue
            r = sum(v[k] for k in nb) + kappa * u
            if rhs is not None:
                r -= rhs(m, n)
            out[(m, n)] = r
        return out

    # -- serialization -------------------------------------------------------------
    def entries(self):
        return [(m, n, self.values[(m, n)].real, self.values[(m, n)].imag)
                for (m, n) in self.nodes()]

    def dump(self, fp, fmt="csv"):
        """Write to an open text stream."""
        if fmt == "csv":
            for k in sorted(self.meta):
                fp.write(f"# {k}: {json.dumps(_jsonable(self.meta[k]), sort_keys=True)}\n")
            fp.write("m,n,re,im\n")
            for m, n, re, im in self.entries():
                fp.write(f"{m},{n},{_fmt(re)},{_fmt(im)}\n")
        elif fmt == "json":
            doc = {
                "meta": _jsonable(self.meta),
                "entries": [[m, n, float(_fmt(re)), float(_fmt(im))] for m, n, re, im in self.entries()],
            }
            json.dump(doc, fp, indent=1, sort_keys=True)
            fp.write("\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")

    def to_csv(self, path):
        self.write(path, "csv")

    def to_json(self, path):
        self.write(path, "json")

    def write(self, path, fmt="csv"):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {fmt!r}")
        with open(path, "w", newline="\n") as f:
            self.dump(f, fmt)

    @classmethod
    def read_csv(cls, path):
        meta, values = {}, {}
        with open(path) as f:
            for line in f:
                line = line.rstrip("\n")
                if line.startswith("#"):
                    k, _, v = line[1:].strip().partition(": ")
                    meta[k] = json.loads(v)
                elif line and not line.startswith("m,"):
                    m, n, re, im = line.split(",")
                    values[(int(m), int(n))] = complex(float(re), float(im))
        return cls(values, meta)

    @classmethod
    def read_json(cls, path):
        with open(path) as f:
            doc = json.load(f)
        values = {(int(m), int(n)): complex(re, im) for m, n, re, im in doc["entries"]}
        return cls(values, doc["meta"])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(_fmt(obj.real)), "im": float(_fmt(obj.imag))}
    if isinstance(obj, (np.floating, float)):
        return float(_fmt(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj
