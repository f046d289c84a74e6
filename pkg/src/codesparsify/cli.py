"""Batch front-end and file formats.

Run as ``python -m codesparsify.cli <command> ...``. Exit status is 0 when the
output verifies (or verification was out of reach and skipped), 2 when the
oracle finds a violation and 1 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .applications import CayleySpec, HedgeGraph, cayley_to_code, hedge_to_code
from .codes import GeneratingMatrix
from .csp import (ClassificationError, CspInstance, Predicate, affine_sparsify,
                  and_projection_general, and_projection_symmetric, classify_arity3,
                  nontrivial_sparsify, periodicity, sparsify_symmetric_csp, symmetric_levels)
from .groups import GroupSpec
from .lattice import NotClosedError, affine_rep_from_closed_zeros
from .sparsifier import DEFAULT_CONFIG, SparsifyConfig, sparsify


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<input>"):
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    epsilon: float = 0.25
    seed: int = 0
    eta: float | None = None
    max_enum: int = 200_000
    replica_cap: int = 10**7
    out: str | None = None
    report: str | None = None
    sample: bool = False

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.max_enum <= 0 or self.replica_cap <= 0:
            raise ValueError("caps must be positive")

    def sparsify_config(self) -> SparsifyConfig:
        cfg = DEFAULT_CONFIG.with_(replica_cap=self.replica_cap)
        return cfg.with_(eta=self.eta) if self.eta is not None else cfg


# text formats

def _lines(text: str):
    """(line number, tokens) for non-blank lines with comments stripped."""
    for k, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield k, body.split()


def _ints(tokens, k, source):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"expected integers, got {' '.join(tokens)!r}", k, source) from None


def _weight(token, k, source):
    try:
        w = float(token)
    except ValueError:
        raise FormatError(f"bad weight {token!r}", k, source) from None
    if not w >= 0 or w == float("inf"):
        raise FormatError(f"weight {token} must be a finite nonnegative number", k, source)
    return w


def _expect(lines, keyword, count, source):
    try:
        k, toks = next(lines)
    except StopIteration:
        raise FormatError(f"missing '{keyword}' line", None, source) from None
    if toks[0] != keyword or (count is not None and len(toks) != count + 1):
        raise FormatError(f"expected '{keyword}' with {count} values, got {' '.join(toks)!r}", k, source)
    return k, toks[1:]


def _header(lines, magic, source):
    try:
        k, toks = next(lines)
    except StopIteration:
        raise FormatError("empty file", None, source) from None
    if toks != magic.split():
        raise FormatError(f"expected header '{magic}', got {' '.join(toks)!r}", k, source)


def parse_code(text: str, source: str = "<input>") -> GeneratingMatrix:
    lines = _lines(text)
    _header(lines, "CODE v1", source)
    k, toks = _expect(lines, "group", None, source)
    moduli = _ints(toks, k, source)
    if not moduli or any(q < 2 for q in moduli):
        raise FormatError("group needs at least one modulus, each at least 2", k, source)
    k, toks = _expect(lines, "dims", 2, source)
    m, n = _ints(toks, k, source)
    u = len(moduli)
    E = np.zeros((m, n, u), dtype=object if max(moduli) >= 2**31 else np.int64)
    W = []
    seen = 0
    for k, toks in lines:
        if seen == m:
            raise FormatError(f"more than {m} rows", k, source)
        if len(toks) != n + 1:
            raise FormatError(f"row needs a weight and {n} entries, got {len(toks)} tokens", k, source)
        W.append(_weight(toks[0], k, source))
        for c, tok in enumerate(toks[1:]):
            parts = tok.split(":")
            if len(parts) != u:
                raise FormatError(f"entry {tok!r} needs {u} colon-joined residues", k, source)
            res = _ints(parts, k, source)
            if any(not 0 <= r < q for r, q in zip(res, moduli)):
                raise FormatError(f"entry {tok!r} has a residue out of range", k, source)
            E[seen, c] = res
        seen += 1
    if seen != m:
        raise FormatError(f"expected {m} rows, found {seen}", None, source)
    return GeneratingMatrix(GroupSpec(tuple(moduli)), E, W)


def format_code(G: GeneratingMatrix) -> str:
    out = ["CODE v1", "group " + " ".join(map(str, G.spec.moduli)), f"dims {G.m} {G.n}"]
    for j in range(G.m):
        ents = [":".join(str(int(r)) for r in G.entries[j, c]) for c in range(G.n)]
        out.append(" ".join([repr(float(G.weights[j]))] + ents))
    return "\n".join(out) + "\n"


def parse_sparse(text: str, source: str = "<input>") -> list[tuple[int, float]]:
    lines = _lines(text)
    _header(lines, "SPARSE v1", source)
    pairs = []
    for k, toks in lines:
        if len(toks) != 2:
            raise FormatError("expected 'index weight'", k, source)
        (i,) = _ints(toks[:1], k, source)
        if pairs and i <= pairs[-1][0]:
            raise FormatError("indices must be strictly increasing", k, source)
        pairs.append((i, _weight(toks[1], k, source)))
    return pairs


def format_sparse(pairs) -> str:
    pairs = sorted((int(i), float(w)) for i, w in pairs)
    return "SPARSE v1\n" + "".join(f"{i} {w!r}\n" for i, w in pairs)


def parse_cayley(text: str, source: str = "<input>") -> CayleySpec:
    lines = _lines(text)
    _header(lines, "CAYLEY v1", source)
    k, toks = _expect(lines, "group", 2, source)
    q, n = _ints(toks, k, source)
    k, toks = _expect(lines, "cyclic", 1, source)
    (flag,) = _ints(toks, k, source)
    if flag not in (0, 1):
        raise FormatError("cyclic must be 0 or 1", k, source)
    gens = []
    for k, toks in lines:
        if len(toks) != n + 1:
            raise FormatError(f"generator line needs a weight and {n} entries", k, source)
        gens.append((tuple(_ints(toks[1:], k, source)), _weight(toks[0], k, source)))
    try:
        return CayleySpec(q, n, tuple(gens), bool(flag))
    except ValueError as exc:
        raise FormatError(str(exc), None, source) from None


def format_cayley(spec: CayleySpec) -> str:
    out = ["CAYLEY v1", f"group {spec.q} {spec.n}", f"cyclic {int(spec.cyclically_closed)}"]
    out += [" ".join([repr(float(w))] + [str(v) for v in vec]) for vec, w in spec.generators]
    return "\n".join(out) + "\n"


def _json(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, source) from None


def _predicate(obj, arity, source) -> Predicate:
    kind = obj.get("type") if isinstance(obj, dict) else None
    if kind == "table":
        bits = obj["bits"]
        P = Predicate.from_bits(bits)
    elif kind == "symmetric":
        P = Predicate.symmetric(arity, zeros=obj["zeros"])
    else:
        raise FormatError("predicate type must be 'table' or 'symmetric'", None, source)
    if P.arity != arity:
        raise FormatError(f"predicate arity {P.arity} differs from arity {arity}", None, source)
    return P


def parse_csp(text: str, source: str = "<input>") -> CspInstance:
    obj = _json(text, source)
    try:
        n, r = int(obj["n"]), int(obj["arity"])
        P = _predicate(obj["predicate"], r, source)
        scopes = [tuple(c["vars"]) for c in obj["constraints"]]
        weights = [float(c.get("w", 1.0)) for c in obj["constraints"]]
        return CspInstance.uniform(n, P, scopes, weights)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid CSP document: {exc}", None, source) from None


def format_csp(inst: CspInstance) -> str:
    (P,) = inst.predicates() or [None]
    obj = {"n": inst.n, "arity": P.arity if P else 0,
           "predicate": {"type": "table", "bits": P.bitstring() if P else ""},
           "constraints": [{"vars": list(c.vars), "w": c.weight} for c in inst.constraints]}
    return json.dumps(obj) + "\n"


def parse_hedge(text: str, source: str = "<input>") -> HedgeGraph:
    obj = _json(text, source)
    try:
        return HedgeGraph(int(obj["n"]), tuple((float(h.get("w", 1.0)), h["components"])
                                               for h in obj["hedges"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid hedge document: {exc}", None, source) from None


def format_hedge(h: HedgeGraph) -> str:
    obj = {"n": h.n, "hedges": [{"w": e.weight, "components": [list(c) for c in e.components]}
                                for e in h.hedges]}
    return json.dumps(obj) + "\n"


def detect_format(text: str) -> str:
    for _, toks in _lines(text):
        if toks[0] in ("CODE", "CAYLEY", "SPARSE"):
            return toks[0].lower()
        break
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        return "unknown"
    if isinstance(obj, dict) and "hedges" in obj:
        return "hedge"
    if isinstance(obj, dict) and "constraints" in obj:
        return "csp"
    return "unknown"


# commands

def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(exc.strerror or str(exc), None, str(path)) from None


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _finish(rc: RunConfig, pairs, report, info) -> int:
    _write(rc.out, format_sparse(pairs))
    doc = {"config": asdict(rc), "output_size": len(pairs), **info,
           "verification": report.to_dict() if report is not None else None}
    if rc.report:
        Path(rc.report).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if report is None:
        print("verification skipped: instance exceeds the enumeration cap", file=sys.stderr)
        return 0
    if not report.passed:
        print(f"verification failed: {len(report.violations)} violations, "
              f"ratios in [{report.min_ratio:.4f}, {report.max_ratio:.4f}]", file=sys.stderr)
        return 2
    return 0


def _try(check):
    try:
        return check()
    except oracle.CapExceededError:
        return None


def _stats(res):
    return {"sizes": res.stats.get("sizes"), "depth": res.stats.get("depth")}


def cmd_sparsify_code(path, rc: RunConfig) -> int:
    G = parse_code(_read(path), str(path))
    res = sparsify(G, rc.epsilon, rc.seed, rc.sparsify_config())
    report = _try(lambda: oracle.verify_code_sparsifier(G, res, rc.epsilon, rc.max_enum, rc.sample,
                                                        rc.seed))
    return _finish(rc, res.entries, report, {"input_size": G.m, **_stats(res)})


def _sparsify_csp(inst: CspInstance, eps, seed, cfg) -> CspInstance:
    """Driver choice: symmetric periodic, then polynomial, then lattice affine."""
    if inst.m == 0:
        return inst
    (P,) = inst.predicates()
    levels = symmetric_levels(P)
    if levels is not None and (0 not in levels or periodicity(levels, P.arity) is not None):
        return sparsify_symmetric_csp(inst, eps, seed, cfg)
    if len(P.satisfying()) != 1:
        return nontrivial_sparsify(inst, eps, seed, cfg)
    try:
        rep = affine_rep_from_closed_zeros(P)
    except NotClosedError:
        raise ClassificationError("predicate has a single satisfying assignment and no affine form")
    return affine_sparsify(inst, rep, eps, seed, cfg)


def cmd_sparsify_csp(path, rc: RunConfig) -> int:
    inst = parse_csp(_read(path), str(path))
    out = _sparsify_csp(inst, rc.epsilon, rc.seed, rc.sparsify_config())
    pairs = [(i, c.weight) for i, c in zip(out.origin or (), out.constraints)]
    report = _try(lambda: oracle.verify_csp_sparsifier(inst, out, rc.epsilon, rc.max_enum))
    return _finish(rc, pairs, report, {"input_size": inst.m})


def cmd_sparsify_cayley(path, rc: RunConfig) -> int:
    spec = parse_cayley(_read(path), str(path))
    res = sparsify(cayley_to_code(spec), rc.epsilon, rc.seed, rc.sparsify_config())
    out = CayleySpec(spec.q, spec.n, tuple((spec.generators[i][0], w) for i, w in res.entries),
                     spec.cyclically_closed)
    report = _try(lambda: oracle.verify_cayley_sparsifier(spec, out, rc.epsilon, rc.max_enum))
    return _finish(rc, res.entries, report, {"input_size": len(spec.generators), **_stats(res)})


def cmd_sparsify_hedge(path, rc: RunConfig) -> int:
    h = parse_hedge(_read(path), str(path))
    live = [j for j, e in enumerate(h.hedges) if e.weight > 0]
    G, _, _ = hedge_to_code(h)
    res = sparsify(G.restrict(live), rc.epsilon, rc.seed, rc.sparsify_config())
    out = HedgeGraph(h.n, tuple((w, h.hedges[i].components) for i, w in res.entries))
    report = _try(lambda: oracle.verify_hedge_sparsifier(h, out, rc.epsilon, rc.max_enum))
    return _finish(rc, res.entries, report, {"input_size": h.m, **_stats(res)})


def cmd_verify(path, sparse_path, rc: RunConfig) -> int:
    text = _read(path)
    pairs = parse_sparse(_read(sparse_path), str(sparse_path))
    kind = detect_format(text)

    def pick(n):
        bad = [i for i, _ in pairs if not 0 <= i < n]
        if bad:
            raise FormatError(f"index {bad[0]} out of range for {n} rows", None, str(sparse_path))
        return [i for i, _ in pairs], [w for _, w in pairs]

    if kind == "code":
        G = parse_code(text, str(path))
        idx, w = pick(G.m)
        check = lambda: oracle.verify_code_sparsifier(G, list(zip(idx, w)), rc.epsilon, rc.max_enum,
                                                      rc.sample, rc.seed)
    elif kind == "csp":
        inst = parse_csp(text, str(path))
        idx, w = pick(inst.m)
        check = lambda: oracle.verify_csp_sparsifier(inst, inst.reweighted(zip(idx, w)), rc.epsilon,
                                                     rc.max_enum)
    elif kind == "cayley":
        spec = parse_cayley(text, str(path))
        idx, w = pick(len(spec.generators))
        sub = CayleySpec(spec.q, spec.n, tuple((spec.generators[i][0], x) for i, x in zip(idx, w)),
                         spec.cyclically_closed)
        check = lambda: oracle.verify_cayley_sparsifier(spec, sub, rc.epsilon, rc.max_enum)
    elif kind == "hedge":
        h = parse_hedge(text, str(path))
        idx, w = pick(h.m)
        sub = HedgeGraph(h.n, tuple((x, h.hedges[i].components) for i, x in zip(idx, w)))
        check = lambda: oracle.verify_hedge_sparsifier(h, sub, rc.epsilon, rc.max_enum)
    else:
        raise FormatError("unrecognized input format", None, str(path))
    try:
        report = check()
    except oracle.CapExceededError as exc:
        raise FormatError(str(exc), None, str(path)) from None
    text = report.to_json() + "\n"
    if rc.report:
        Path(rc.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 2


def _classify_predicate(args) -> Predicate:
    if args.bits:
        return Predicate.from_bits(args.bits)
    if args.symmetric_zeros is not None:
        if args.arity is None:
            raise FormatError("--symmetric-zeros needs --arity")
        zeros = [int(z) for z in args.symmetric_zeros.split(",") if z.strip()]
        return Predicate.symmetric(args.arity, zeros=zeros)
    if args.input:
        (P,) = parse_csp(_read(args.input), args.input).predicates()
        return P
    raise FormatError("classify needs a predicate: --bits, --symmetric-zeros or a CSP file")


_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _and(c) -> str:
    return "AND" + str(c).translate(_SUB)


def classify_lines(P: Predicate, c: int | None = None) -> list[str]:
    out = []
    levels = symmetric_levels(P)
    if levels is not None:
        if 0 not in levels:
            out.append("no zeros: every assignment satisfies")
        else:
            per = periodicity(levels, P.arity)
            if per is not None:
                out.append(f"periodic, ℓ={per[1]}, c={per[0]}: affine over Z_{per[1]}")
            else:
                w = and_projection_symmetric(levels, P.arity)
                out.append(f"aperiodic, {_and(2)} witness: {' '.join(w.images)}")
    if P.arity == 3:
        cls = classify_arity3(P)
        out.append(f"c={cls.c}")
    sat = len(P.satisfying())
    if sat != 1 and (levels is None or 0 in levels):
        out.append(f"nontrivial: {sat} satisfying assignments")
    if c is not None:
        w = (and_projection_symmetric(levels, P.arity) if c == 2 and levels is not None
             else and_projection_general(P, c))
        if w is None:
            out.append(f"no {_and(c)} projection")
        else:
            out.append(f"{_and(c)} witness: {' '.join(w.images)}")
    return out


def cmd_classify(args) -> int:
    P = _classify_predicate(args)
    text = "\n".join(classify_lines(P, args.and_)) + "\n"
    _write(args.out, text)
    return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, default=0.25)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--eta", type=float, default=None, help="override the size constant")
    common.add_argument("--max-enum", type=int, default=200_000,
                        help="largest message, assignment or cut count the oracle sweeps")
    common.add_argument("--replica-cap", type=int, default=10**7)
    common.add_argument("--out", default=None, help="output file (stdout when omitted)")
    common.add_argument("--report", default=None, help="JSON verification report path")
    common.add_argument("--sample", action="store_true",
                        help="verify on random messages when exhaustive enumeration is too large")
    p = argparse.ArgumentParser(prog="codesparsify", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("sparsify-code", "sparsify-csp", "sparsify-cayley", "sparsify-hedge"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("input")
    s = sub.add_parser("verify", parents=[common])
    s.add_argument("input")
    s.add_argument("sparse")
    s = sub.add_parser("classify", parents=[common])
    s.add_argument("input", nargs="?")
    s.add_argument("--bits", help="truth table, x1 the most significant bit")
    s.add_argument("--symmetric-zeros", help="comma-separated Hamming levels where P is 0")
    s.add_argument("--arity", type=int)
    s.add_argument("--and", dest="and_", type=int, default=None,
                   help="also search for a projection to AND of this arity")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        rc = RunConfig(args.epsilon, args.seed, args.eta, args.max_enum, args.replica_cap,
                       args.out, args.report, args.sample)
        if args.command == "classify":
            return cmd_classify(args)
        if args.command == "verify":
            return cmd_verify(args.input, args.sparse, rc)
        run = {"sparsify-code": cmd_sparsify_code, "sparsify-csp": cmd_sparsify_csp,
               "sparsify-cayley": cmd_sparsify_cayley, "sparsify-hedge": cmd_sparsify_hedge}
        return run[args.command](args.input, rc)
    except (ValueError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
