"""Access to the conformance corpus shipped with the package.

Two artifacts are frozen under ``qazb/data`` before release:

* ``fq_conformance.csv`` - reference values of the quantum exponential
  computed by an independent high-precision oracle (40-digit partial
  products at two truncation depths), replayed bit-tolerantly by tests;
* ``pinned.json`` - model constants (residual sweeps, separation
  certificate, truncation signatures) recorded by the reference sweep,
  used as envelopes by the acceptance suite and the CLI gates.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class FqReferenceRow:
    q: float
    kind: str               # "grid", "special", "continuity"
    k: int
    theta_num_pi: float     # theta as a multiple of pi
    re: float
    im: float


def load_fq_table() -> list[FqReferenceRow]:
    ref = resources.files("qazb.data").joinpath("fq_conformance.csv")
    rows = []
    with ref.open() as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                FqReferenceRow(
                    q=float(rec["q"]),
                    kind=rec["kind"],
                    k=int(rec["k"]),
                    theta_num_pi=float(rec["theta_numerator_pi"]),
                    re=float(rec["re_Fq"]),
                    im=float(rec["im_Fq"]),
                )
            )
    return rows


def load_pinned() -> dict:
    ref = resources.files("qazb.data").joinpath("pinned.json")
    try:
        with ref.open() as fh:
            return json.load(fh)
    except FileNotFoundError:
        return {}
