"""Deterministic JSON and markdown renderings of inequality reports.

Numbers are written as strings: rationals as ``p/q``, real values as a fixed
number of significant digits plus their error bound.  Keys are sorted so two runs
on the same input give byte-identical output.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from typing import Any

import mpmath

from .arith import LogSum, LogValue, fraction_str
from .szpiro import InequalityReport

OUTPUT_DIGITS = 30

# What produced each reported quantity.
PROVENANCE = {
    "lhs": {
        "tautological": "minus the normalized degree of the q-pilot divisor",
        "probabilistic": "ln|minimal discriminant| / ((6 + eps) [F:Q])",
        "baby": "ln|minimal discriminant| / ((6 + eps) [F:Q])",
        "explicit": "ln|minimal discriminant|",
    },
    "rhs": {
        "tautological": "iterated expectation of ln(hull radius) per prime plus (l+5)/4 ln(pi)",
        "probabilistic": "ln(mean different) + sum ln(mean ramification) + A",
        "baby": "(5/4)^2 ln[K:Q] ln|Disc K| + ln(pi)",
        "explicit": "A0 d0^2 l^4 + B0 d0 + (24 + eps)(ln|Cond| + ln|Disc F|)",
    },
    "components": {
        "A": "ln(pi) + sum_p (1 - P_unr^((l+1)/2))(ln b_p + 5/(l+4))",
        "A_with_4_over_l_plus_5": "same sum with the coefficient 4/(l+5) from the term-III division",
        "ln_diffbar": "sum_p ln E(p^diff)",
        "sum_ln_ebar": "sum_p ln E(e)",
        "infinite": "archimedean share (l+5)/4 ln(pi)",
        "large": "(l+5)/4 times the sum of ln p over ramified p above the ceiling B",
        "large_bound": "(l+5)/4 * 2 (ln|Disc F| + ln|Cond|) / [F:Q]",
        "small": "(l+3) ln(B) pi(B)",
        "pre_result_rhs": "(24 + eps)((ln(B) pi(B) + ln(pi)) [F:Q] + ln|Disc F| + ln|Cond|)",
        "per_prime": "enumerated iterated expectation, with the closed-form term sum beside it",
        "terms": "closed-form bounds I..V per prime and, where enumerable, exact values",
    },
}


def _digits() -> int:
    return OUTPUT_DIGITS


def log_value_json(x: LogValue) -> dict[str, str]:
    err = "0" if x.error == 0 else mpmath.nstr(x.error, 3)
    return {"value": x.to_str(_digits()), "error": err}


def to_jsonable(obj: Any) -> Any:
    """Recursively convert report objects into JSON-safe values with string numerics."""
    if isinstance(obj, LogValue):
        return log_value_json(obj)
    if isinstance(obj, LogSum):
        return {"ln_combination": {str(p): fraction_str(c) for p, c in obj.terms.items()},
                **log_value_json(obj.evaluate())}
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, mpmath.mpf):
        return mpmath.nstr(obj, _digits())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def report_dict(report: InequalityReport) -> dict:
    out = to_jsonable(report)
    out["provenance"] = {
        "lhs": PROVENANCE["lhs"][report.kind],
        "rhs": PROVENANCE["rhs"][report.kind],
        "components": {k: v for k, v in PROVENANCE["components"].items() if k in report.components},
    }
    return out


def reports_json(reports: dict[str, InequalityReport], meta: dict | None = None) -> str:
    payload = {"reports": {k: report_dict(r) for k, r in reports.items()}}
    if meta:
        payload["meta"] = to_jsonable(meta)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _fmt(x: Any) -> str:
    if isinstance(x, LogValue):
        return x.to_str(15) + ("" if x.error == 0 else f" ± {mpmath.nstr(x.error, 2)}")
    if isinstance(x, LogSum):
        return _fmt(x.evaluate())
    if isinstance(x, Fraction):
        return fraction_str(x)
    return str(x)


def reports_markdown(reports: dict[str, InequalityReport], meta: dict | None = None) -> str:
    lines = ["# Szpiro bound report", ""]
    for key, value in sorted((meta or {}).items()):
        lines.append(f"- {key}: {_fmt(value)}")
    if meta:
        lines.append("")
    for kind, r in reports.items():
        lines += [f"## {kind}", "",
                  f"- LHS: {_fmt(r.lhs)}  ({PROVENANCE['lhs'][kind]})",
                  f"- RHS: {_fmt(r.rhs)}  ({PROVENANCE['rhs'][kind]})",
                  f"- verdict (LHS <= RHS): **{r.verdict}**", ""]
        scalars = {k: v for k, v in r.components.items() if isinstance(v, (LogValue, LogSum, Fraction, int, str))}
        if scalars:
            lines += ["| component | value | source |", "|---|---|---|"]
            for k in sorted(scalars):
                lines.append(f"| {k} | {_fmt(scalars[k])} | {PROVENANCE['components'].get(k, '')} |")
            lines.append("")
        if kind == "tautological":
            lines += ["| p | value | source | closed-form term sum | value <= term sum |", "|---|---|---|---|---|"]
            for p, row in sorted(r.components["per_prime"].items()):
                lines.append(f"| {p} | {_fmt(row['value'])} | {row['source']} | {_fmt(row['term_sum'])} "
                             f"| {row['term_sum_verdict']} |")
            verdicts = r.components["terms"].term_IV_verdict
            lines += ["", "Term IV, exact <= displayed bound: "
                      + ", ".join(f"p={p}: {v}" for p, v in sorted(verdicts.items())), ""]
        if r.checks:
            lines += ["Checks:", ""]
            for k in sorted(r.checks):
                lines.append(f"- {k}: {_fmt(r.checks[k])}")
            lines.append("")
        for w in r.warnings:
            lines.append(f"> warning: {w}")
        if r.warnings:
            lines.append("")
    return "\n".join(lines).rstrip() + "\n"
