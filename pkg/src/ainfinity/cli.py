"""Command-line driver: configure a run, execute, verify, serialize, query.

The structure file is a single JSON document containing integers only
(exact arithmetic needs no floats): a header with the run parameters and
halting state, the monomial listing, the product table, the map table
(period-compressed when certified), and the verification summary.
Records are sorted by arity and then by input indices, so files are
byte-reproducible across runs with the same configuration.

Queries evaluate tuples of ring elements (written over the generators
1, x, y with scalar coefficients, e.g. "product: y*x, x, x, x") by
linear extension from the stored basis values.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .endo_dga import EndomorphismAlgebra
from .errors import AInfinityError, InvalidParameter, UnresolvableValue
from .kadeishvili import (AInfinityRecord, HElement, StructureSummary, UNIT,
                          X, monomial_degree, monomial_name,
                          monomial_of_degree)
from .resolution import build_cyclic_resolution
from .stasheff import verify_structure

FORMAT_NAME = "ainfinity-structure/1"


@dataclass
class RunConfig:
    p: int
    q: int
    max_arity: int
    mode: str = "reduced"          # "reduced" | "brute-force"
    f1_mode: str = "paper"         # "paper" | "auto"
    truncation: int | None = None
    verify: bool = False
    output: str | None = None

    def internal_mode(self) -> str:
        return "brute" if self.mode == "brute-force" else "reduced"

    def resolved_truncation(self) -> int:
        if self.truncation is not None:
            return self.truncation
        return default_truncation(self.max_arity)


def default_truncation(max_arity: int) -> int:
    # Largest generator degree in play is 2 (the polynomial class), so every
    # map reached by arity-n assembly has degree <= 2n; two extra periods
    # keep the window edge away from all homology solves.
    return 2 * (2 * max_arity + 2)


@dataclass
class RunResult:
    record: AInfinityRecord
    summary: StructureSummary
    report: object | None
    document: dict
    exit_code: int
    lines: list


# ----- element and query parsing -------------------------------------------------

_FACTOR_RE = re.compile(r"^(?:(\d+)|x(?:\^(\d+))?|y(?:\^(\d+))?)$")


def parse_element(text: str, p: int) -> HElement:
    """Parse a sum of scalar-weighted monomials in x and y."""
    text = text.strip()
    if not text:
        raise InvalidParameter("empty element expression")
    normalized = text.replace("-", "+-")
    terms = {}
    for chunk in normalized.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        sign = 1
        if chunk.startswith("-"):
            sign = -1
            chunk = chunk[1:].strip()
        coeff, e, j = 1, 0, 0
        for factor in chunk.split("*"):
            factor = factor.strip()
            m = _FACTOR_RE.match(factor)
            if not m:
                raise InvalidParameter(f"cannot parse factor {factor!r} in {text!r}")
            if m.group(1) is not None:
                coeff *= int(m.group(1))
            elif factor.startswith("x"):
                e += int(m.group(2)) if m.group(2) else 1
            else:
                j += int(m.group(3)) if m.group(3) else 1
        if e >= 2:
            continue  # x^2 = 0 in the cohomology ring
        mono = (e, j)
        terms[mono] = terms.get(mono, 0) + sign * coeff
    return HElement(p, terms)


def split_query(expr: str) -> tuple[str, list[str]]:
    m = re.match(r"^\s*(product|map)\s*[:(]?\s*(.*?)\s*\)?\s*$", expr, re.S)
    if not m:
        raise InvalidParameter(
            f"cannot parse query {expr!r}; expected 'product: a,b,...' or 'map: a,b,...'")
    kind, rest = m.group(1), m.group(2)
    slots = [s for s in (part.strip() for part in rest.split(",")) if s]
    if not slots:
        raise InvalidParameter("query needs at least one tuple entry")
    return kind, slots


def format_element(el: HElement) -> str:
    return str(el)


def format_class(degree: int, coeff: int) -> str:
    if coeff == 0:
        return "0"
    name = monomial_name(monomial_of_degree(degree))
    if name == "1":
        return str(coeff)
    return name if coeff == 1 else f"{coeff}*{name}"


# ----- serialization --------------------------------------------------------------

def _monomial_listing(record: AInfinityRecord) -> list:
    monos = {UNIT, X, (0, 1)}
    for key in list(record.m_table) + list(record.f_table):
        monos.update(key)
    ordered = sorted(monos, key=lambda m: (monomial_degree(m), m[0], m[1]))
    return ordered


def serialize_structure(record: AInfinityRecord, summary: StructureSummary,
                        report, config: RunConfig) -> dict:
    listing = _monomial_listing(record)
    index = {mono: i for i, mono in enumerate(listing)}
    basis = [{"index": i, "name": monomial_name(m), "eps": m[0], "ypow": m[1],
              "degree": monomial_degree(m)} for i, m in enumerate(listing)]

    products = []
    for key in sorted(record.m_table, key=lambda k: (len(k), [index[m] for m in k])):
        value = record.m_table[key]
        products.append({
            "arity": len(key),
            "inputs": [index[m] for m in key],
            "degree": value.degree,
            "coords": [int(c) for c in value.coords],
        })

    maps = []
    for key in sorted(record.f_table, key=lambda k: (len(k), [index[m] for m in k])):
        value = record.f_table[key]
        arity = len(key)
        cert = record.certificates.get(arity)
        entry = {
            "arity": arity,
            "inputs": [index[m] for m in key],
            "degree": value.degree,
        }
        if cert is not None and key in cert.compacts:
            compact = cert.compacts[key]
            entry["period"] = compact.period
            entry["base"] = compact.base
            entry["components"] = [b.entries.tolist() for b in compact.blocks]
        else:
            entry["period"] = 0
            entry["base"] = value.degree
            entry["components"] = [value.component(n).entries.tolist()
                                   for n in value.position_range()]
        maps.append(entry)

    halting = ({"status": "complete", "arity": summary.halted_at}
               if summary.halted_at is not None else {"status": "open"})
    doc = {
        "format": FORMAT_NAME,
        "header": {
            "p": summary.p,
            "q": summary.q,
            "period": record.algebra.resolution.period,
            "truncation": summary.truncation,
            "mode": config.mode,
            "f1": summary.f1_mode,
            "max_arity": config.max_arity,
            "halting": halting,
            "mq_sign": summary.mq_sign,
        },
        "basis": basis,
        "products": products,
        "maps": maps,
        "verification": ({
            "enabled": True,
            "passed": bool(report.passed),
            "checked": report.checked,
            "max_arity": report.max_arity,
            "first_failure": (str(report.first_failure)
                              if report.first_failure else None),
        } if report is not None else {"enabled": False}),
    }
    return doc


def dump_structure(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def parse_structure(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise InvalidParameter(f"not a {FORMAT_NAME} document")
    for section in ("header", "basis", "products", "maps"):
        if section not in doc:
            raise InvalidParameter(f"structure file is missing {section!r}")
    return doc


class DocTable:
    """Query evaluation against a parsed structure file.

    Mirrors the engine's resolution rules (strict unitality, the ring
    product at arity 2, polynomial-class linearity, halting extension)
    using only the values stored in the document.
    """

    def __init__(self, doc: dict):
        self.doc = doc
        self.p = doc["header"]["p"]
        self.q = doc["header"]["q"]
        self.monos = [(b["eps"], b["ypow"]) for b in
                      sorted(doc["basis"], key=lambda b: b["index"])]
        self.products = {}
        for entry in doc["products"]:
            key = tuple(self.monos[i] for i in entry["inputs"])
            self.products[key] = (entry["degree"], list(entry["coords"]))
        self.maps = {}
        for entry in doc["maps"]:
            key = tuple(self.monos[i] for i in entry["inputs"])
            self.maps[key] = entry
        halting = doc["header"]["halting"]
        self.halted_at = halting.get("arity") if halting["status"] == "complete" else None

    def _halted(self, n: int) -> bool:
        return self.halted_at is not None and n >= self.halted_at

    def product(self, key: tuple) -> tuple[int, int]:
        """(degree, coefficient) of m_n on a monic monomial tuple."""
        n = len(key)
        degree = sum(monomial_degree(m) for m in key) + 2 - n
        if n == 1:
            return degree, 0
        if n == 2:
            (e1, j1), (e2, j2) = key
            if e1 and e2:
                return degree, 0
            return degree, 1
        if any(m == UNIT for m in key):
            return degree, 0
        stored = self.products.get(key)
        if stored is not None:
            return stored[0], (stored[1][0] if stored[1] else 0)
        if self._halted(n):
            return degree, 0
        if any(e == 0 for e, _ in key):
            return degree, 0
        core = (X,) * n
        stored = self.products.get(core)
        if stored is None:
            raise UnresolvableValue(
                f"arity {n} is outside the computed range of the file "
                "(status is open)")
        return degree, (stored[1][0] if stored[1] else 0)

    def product_element(self, slots: list[HElement]) -> HElement:
        import itertools
        acc = HElement(self.p)
        for combo in itertools.product(*(s.terms.items() for s in slots)):
            key = tuple(m for m, _ in combo)
            coeff = 1
            for _, c in combo:
                coeff = (coeff * c) % self.p
            degree, value = self.product(key)
            if value:
                acc = acc.add(HElement.monomial(self.p, monomial_of_degree(degree),
                                                value * coeff))
        return acc

    def map_entry(self, key: tuple) -> tuple[dict | None, int]:
        """(stored entry, extra y-shift) realizing f_n on the tuple, or
        (None, 0) when the value is zero."""
        n = len(key)
        if any(m == UNIT for m in key):
            return None, 0
        stored = self.maps.get(key)
        if stored is not None:
            return stored, 0
        if self._halted(n):
            return None, 0
        if any(e == 0 for e, _ in key):
            return None, 0
        if self.doc["header"]["f1"] != "paper":
            raise UnresolvableValue(
                "map queries with y-multiplied entries need a paper-mode file")
        shift = sum(j for _, j in key)
        stored = self.maps.get((X,) * n)
        if stored is None:
            raise UnresolvableValue(
                f"arity {n} is outside the computed range of the file "
                "(status is open)")
        return stored, shift


def format_map_entry(entry: dict | None, shift: int) -> list:
    if entry is None:
        return ["0 (zero map)"]
    degree = entry["degree"] + 2 * shift
    lines = [f"degree {degree}" + (f" (shifted by y^{shift})" if shift else "")]
    if entry["period"]:
        lines.append(f"periodic with period {entry['period']}, base position {entry['base'] + 2 * shift}")
        for i, comp in enumerate(entry["components"]):
            lines.append(f"  position {entry['base'] + 2 * shift + i} (mod {entry['period']}): {comp}")
    else:
        lines.append(f"full component list from position {entry['base'] + 2 * shift}")
        for i, comp in enumerate(entry["components"]):
            lines.append(f"  position {entry['base'] + 2 * shift + i}: {comp}")
    return lines


# ----- run and query drivers -------------------------------------------------------

def run(config: RunConfig) -> RunResult:
    if config.p is None or config.q is None:
        raise InvalidParameter("--p and --q are required to compute a structure")
    resolution = build_cyclic_resolution(config.p, config.q, config.resolved_truncation())
    algebra = EndomorphismAlgebra(resolution, f1_mode=config.f1_mode)
    record = AInfinityRecord(algebra, mode=config.internal_mode())
    summary = record.compute_structure(config.max_arity)
    report = verify_structure(record, config.max_arity) if config.verify else None
    doc = serialize_structure(record, summary, report, config)

    lines = []
    lines.append(
        f"A-infinity structure over F_{summary.p}[a]/(a^{summary.q}): "
        f"cohomology ring = exterior(x) (x) k[y], |x|=1, |y|=2")
    lines.append(
        f"mode={config.mode} f1={summary.f1_mode} truncation L={summary.truncation} "
        f"arities 2..{max(summary.computed_arities, default=0)}")
    lines.append("m_2 = ring product; nonzero higher products on basis tuples:")
    higher = [(k, v) for k, v in summary.nonzero_products if len(k) > 2]
    if higher:
        for key, value in higher:
            tup = ",".join(monomial_name(m) for m in key)
            lines.append(f"  m_{len(key)}({tup}) = {format_class(value.degree, value.coords[0])}")
    else:
        lines.append("  (none)")
    lines.append("nonzero quasi-isomorphism components on basis tuples:")
    if summary.nonzero_map_keys:
        for key in summary.nonzero_map_keys:
            tup = ",".join(monomial_name(m) for m in key)
            value = record.f_table[key]
            block = [repr(value.component(n).entry(0, 0))
                     for n in range(value.degree, value.degree + 2)]
            lines.append(f"  f_{len(key)}({tup}): degree {value.degree}, "
                         f"components from position {value.degree}: {block} repeating")
    else:
        lines.append("  (none)")
    lines.append(f"halting: {summary.status}")
    if summary.periodic_arities:
        lines.append(
            "periodicity certificates at arities "
            + ",".join(str(a) for a in summary.periodic_arities))
    if report is not None:
        lines.append(str(report))
    exit_code = 0 if (report is None or report.passed) else 1
    return RunResult(record, summary, report, doc, exit_code, lines)


def run_query(expr: str, doc: dict) -> list:
    table = DocTable(doc)
    kind, raw_slots = split_query(expr)
    slots = [parse_element(s, table.p) for s in raw_slots]
    if kind == "product":
        value = table.product_element(slots)
        return [f"{format_element(value)}"]
    for s in slots:
        if len(s.terms) != 1 or next(iter(s.terms.values())) != 1:
            raise InvalidParameter(
                "map queries take monic monomial entries (e.g. 'map: y*x, x')")
    key = tuple(next(iter(s.terms)) for s in slots)
    entry, shift = table.map_entry(key)
    return format_map_entry(entry, shift)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ainfinity",
        description="Compute the A-infinity structure on the Ext algebra of "
                    "F_p[a]/(a^q), verify it, and serialize or query it.")
    parser.add_argument("--p", type=int, default=None, help="prime characteristic")
    parser.add_argument("--q", type=int, default=None, help="truncation exponent (>= 3)")
    parser.add_argument("--max-arity", type=int, default=None,
                        help="highest arity to compute (default 2q)")
    parser.add_argument("--mode", choices=["reduced", "brute-force"], default="reduced")
    parser.add_argument("--f1", choices=["paper", "auto"], default="paper",
                        help="cycle-choosing section: pinned generators or echelon")
    parser.add_argument("--truncation", type=int, default=None,
                        help="override the default resolution length")
    parser.add_argument("--verify", action="store_true",
                        help="run the Stasheff identity verifier")
    parser.add_argument("--output", type=str, default=None,
                        help="structure file to write (or to read in query mode)")
    parser.add_argument("--query", type=str, default=None,
                        help="evaluate 'product: ...' or 'map: ...' on a tuple")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.query is not None:
            if args.output and Path(args.output).exists():
                doc = parse_structure(Path(args.output).read_text())
            else:
                if args.p is None or args.q is None:
                    raise InvalidParameter(
                        "query mode needs an existing --output file or --p/--q "
                        "to compute the structure first")
                config = _config_from(args)
                doc = run(config).document
            for line in run_query(args.query, doc):
                print(line)
            return 0
        config = _config_from(args)
        result = run(config)
        for line in result.lines:
            print(line)
        if args.output:
            Path(args.output).write_text(dump_structure(result.document))
            print(f"wrote structure file: {args.output}")
        return result.exit_code
    except AInfinityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _config_from(args) -> RunConfig:
    if args.p is None or args.q is None:
        raise InvalidParameter("--p and --q are required")
    max_arity = args.max_arity if args.max_arity is not None else 2 * args.q
    return RunConfig(p=args.p, q=args.q, max_arity=max_arity, mode=args.mode,
                     f1_mode=args.f1, truncation=args.truncation,
                     verify=args.verify, output=args.output)


if __name__ == "__main__":
    sys.exit(main())
