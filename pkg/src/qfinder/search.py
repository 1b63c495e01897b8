"""Run all three families for one potential and collect the integrals found."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .constraints import Potential, solve_integral1, solve_integral2, unsound_members
from .exponential import InexactRate, solve_integral3
from .geometry import KT_PARAMS, L_PARAMS, GeometryConfig
from .qfi import QFI
from .ring import format_rational

FAMILIES = (1, 2, 3)


@dataclass
class Found:
    family: int
    qfi: QFI
    params: list[tuple[str, int]]
    tags: dict = field(default_factory=dict)

    def to_json(self, dimension: int, name: str) -> dict:
        doc = {"name": name, **self.qfi.to_json()}
        doc["family"] = self.family
        doc["dimension"] = dimension
        doc["params"] = dict(self.params)
        doc.update(self.tags)
        return doc


@dataclass
class FamilyResult:
    family: int
    dimension: int
    found: list[Found]
    notes: dict = field(default_factory=dict)


@dataclass
class SearchReport:
    potential: Potential
    results: list[FamilyResult]
    inexact_rates: list[InexactRate] = field(default_factory=list)

    def all_qfis(self) -> list[QFI]:
        return [f.qfi for r in self.results for f in r.found]

    def by_family(self, family: int) -> FamilyResult | None:
        return next((r for r in self.results if r.family == family), None)

    def unsound(self) -> list[Found]:
        found = [f for r in self.results for f in r.found]
        bad = unsound_members([f.qfi for f in found], self.potential)
        return [found[i] for i in bad]

    def to_json(self) -> dict:
        out = {
            "dim": self.potential.dim,
            "potential": str(self.potential),
            "families": [],
        }
        for r in self.results:
            out["families"].append({
                "family": r.family,
                "dimension": r.dimension,
                **r.notes,
                "qfis": [f.to_json(r.dimension, f"I{r.family}.{j}") for j, f in enumerate(r.found, 1)],
            })
        if self.inexact_rates:
            out["inexact_rates"] = [
                {"lambda2": x.mu, "factor": x.factor, "residual": x.residual} for x in self.inexact_rates
            ]
        return out


def param_name(label, n: int) -> str:
    tag, i = label
    if tag == "C":
        return f"C:{KT_PARAMS[n][i]}"
    if tag in ("L", "B"):
        return f"{tag}:{L_PARAMS[n][i]}"
    return f"{tag}:{i}"


def _params(labels, vec, n) -> list[tuple[str, int]]:
    return [(param_name(lab, n), v) for lab, v in zip(labels, vec) if v]


def find_integrals(V: Potential, families: Iterable[int] = FAMILIES) -> SearchReport:
    g = GeometryConfig(V.dim)
    n = V.dim
    results = []
    inexact = []
    for fam in sorted(set(families)):
        if fam == 1:
            sp = solve_integral1(g, V)
            found = [Found(1, I, _params(sp.unknown_labels, v, n)) for I, v in zip(sp.basis, sp.param_basis)]
            results.append(FamilyResult(1, sp.dimension, found))
        elif fam == 2:
            sp = solve_integral2(g, V)
            found = []
            for i, (I, v) in enumerate(zip(sp.basis, sp.param_basis)):
                tags = {"killing_vector_lfi": True} if i < sp.trivial else {}
                found.append(Found(2, I, _params(sp.unknown_labels, v, n), tags))
            results.append(FamilyResult(2, sp.dimension, found,
                                        {"killing_vector_lfis": sp.trivial,
                                         "time_dependent": sp.nontrivial_dimension}))
        elif fam == 3:
            sols, search = solve_integral3(g, V)
            found = []
            labels = [("L", i) for i in range(len(L_PARAMS[n]))]
            rates = []
            for s in sols:
                rates.append({"lambda2": format_rational(s.mu), "kernel": s.dimension,
                              "reality": s.rate.reality})
                for sign, qfis in ((1, s.plus), (-1, s.minus)):
                    for I, v in zip(qfis, s.kernel):
                        found.append(Found(3, I, _params(labels, v, n),
                                           {"lambda2": format_rational(s.mu), "sign": sign}))
            results.append(FamilyResult(3, sum(2 * s.dimension for s in sols), found, {"rates": rates}))
            inexact = search.inexact
        else:
            raise ValueError(f"unknown family {fam}")
    return SearchReport(V, results, inexact)


def critical_mu(report: SearchReport) -> list[Fraction]:
    r = report.by_family(3)
    if r is None:
        return []
    return [Fraction(x["lambda2"]) for x in r.notes["rates"]]
