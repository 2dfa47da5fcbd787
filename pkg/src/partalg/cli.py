"""Command line interface.

Exit status: 0 on success, 1 on a usage error, 2 when a computation is
refused (parity, capacity, parse errors and the like). Refusals print one
line to stderr: `error: <code>: <message>`.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .config import FORMATS, load_config, thread_cap
from .errors import DomainError, PartalgError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ output helpers


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _unsupported(fmt, command):
    raise UsageError(f"format {fmt!r} is not available for {command}")


def _csv(rows) -> str:
    return "".join(",".join(str(x) for x in row) + "\n" for row in rows)


# ------------------------------------------------------------------ commands


def cmd_enum(args, cfg, fmt):
    from .diagcat import Diagram, print_diagram
    from .setpart import enumerate_partitions, is_tonal

    if args.tonal is not None and args.tonal < 1:
        raise DomainError("--tonal needs d >= 1")
    if args.even:
        if args.m:
            raise DomainError("--even is for partitions of one row (m = 0)")
        parts = enumerate_partitions(args.n, 0, cap=cfg.enumeration_cap, even=True)
    else:
        parts = enumerate_partitions(args.n, args.m, cap=cfg.enumeration_cap)
        if args.tonal is not None:
            parts = [p for p in parts if is_tonal(p, args.tonal)]
    if fmt == "json":
        return _dump_json({"n": args.n, "m": args.m, "count": len(parts),
                           "partitions": [p.to_json() for p in parts]})
    if fmt == "csv":
        return _csv([["index", "partition"]] + [[i, str(p)] for i, p in enumerate(parts)])
    if fmt == "text":
        return "".join(print_diagram(Diagram(p)) + "\n" for p in parts)
    _unsupported(fmt, "enum")


def cmd_compose(args, cfg, fmt):
    from .diagcat import format_lincomb, parse_expression

    x = parse_expression(args.expr)
    if fmt == "json":
        return _dump_json({
            "source": x.source,
            "target": x.target,
            "terms": [{"coeff": c.to_json(), "diagram": d.to_json()} for d, c in x.items()],
        })
    if fmt == "text":
        return format_lincomb(x) + "\n"
    _unsupported(fmt, "compose")


def cmd_gram(args, cfg, fmt):
    from .spinegram import LABELS, gram_matrix, gram_report, json_algebra, spine_basis

    if args.report or args.smith:
        rep = gram_report(args.algebra, args.n, smith=args.smith, method=args.method,
                          smith_limit=cfg.smith_dim_limit)
        if fmt == "json":
            return _dump_json(rep.to_json())
        if fmt == "text":
            fac = "".join(
                ("d" if r == 0 else f"(d - {r})") + (f"^{m}" if m > 1 else "")
                for r, m in rep.factorization.factors
            )
            lines = [
                f"algebra {json_algebra(rep.algebra)}  n {rep.n}  label {LABELS[rep.kind]}  dim {rep.dim}",
                f"det = {rep.det.format()}",
                f"factored: {rep.factorization.unit} * {fac or '1'}"
                + ("" if rep.factorization.residual == 1 else f" * ({rep.factorization.residual.format()})"),
                f"degree {rep.degree}  predicted {rep.predicted_degree}",
                "head dims: " + ", ".join(f"{k}:{v}" for k, v in sorted(rep.head_dims.items())),
                "checks: " + ", ".join(f"{k}={str(v).lower()}" for k, v in rep.checks.items()),
            ]
            if rep.smith is not None:
                lines.append("smith: " + ", ".join(f.format() for f in rep.smith.invariant_factors))
            return "\n".join(lines) + "\n"
        _unsupported(fmt, "gram --report")
    basis = spine_basis(args.algebra, args.n, cap=cfg.enumeration_cap)
    g = gram_matrix(basis)
    if fmt == "csv":
        return g.to_csv()
    if fmt == "json":
        return _dump_json({
            "algebra": json_algebra(basis.algebra),
            "n": basis.n,
            "label": basis.label,
            "dim": basis.dim,
            "basis": [str(p) for p in basis.index_partitions],
            "entries": [[f"d^{int(k)}" for k in row] for row in g.exponents.tolist()],
        })
    if fmt == "text":
        rows = [" ".join(f"d^{int(k)}" for k in row) for row in g.exponents.tolist()]
        head = [f"{i}: {p}" for i, p in enumerate(basis.index_partitions)]
        return "\n".join(head + [""] + rows) + "\n"
    _unsupported(fmt, "gram")


def cmd_potts(args, cfg, fmt):
    from .diagcat import Diagram, parse_diagram
    from .potts import format_word, orbit_count, potts_image, potts_span_rank, word_at
    from .setpart import enumerate_partitions

    Q, cap = args.q, cfg.potts_capacity
    if Q < 1:
        raise DomainError("--q must be positive")
    if args.image is not None:
        d = parse_diagram(args.image)
        img = potts_image(d, Q, cap)
        if fmt == "json":
            return _dump_json(img.to_json())
        if fmt == "csv":
            return _csv([["row", "col", "value"]] + [[r, c, v] for r, c, v in
                                                      zip(img.r.tolist(), img.c.tolist(), img.v.tolist())])
        if fmt == "text":
            A = img.to_dense()
            lines = []
            for i, row in enumerate(A.tolist()):
                word = format_word(word_at(i, Q, d.source)) if d.source else "-"
                lines.append(f"{word}\t" + " ".join(map(str, row)))
            return "\n".join(lines) + "\n"
        _unsupported(fmt, "potts --image")
    if args.n is None:
        raise UsageError("potts needs --n unless --image is given")
    n = args.n
    out = {"Q": Q, "n": n, "signed": bool(args.signed),
           "orbits": str(orbit_count(Q, n, signed=args.signed, capacity=cap))}
    if args.rank:
        parts = enumerate_partitions(n, 0, cap=cfg.enumeration_cap, even=args.signed)
        rank = potts_span_rank([Diagram(p) for p in parts], Q, cap) if parts else 0
        out["spanning_set"] = len(parts)
        out["rank"] = str(rank)
    if fmt == "json":
        return _dump_json(out)
    if fmt == "text":
        return "".join(f"{k} {str(v).lower() if isinstance(v, bool) else v}\n" for k, v in out.items())
    _unsupported(fmt, "potts")


def cmd_bratelli(args, cfg, fmt):
    from .reptheory import bratelli

    g = bratelli(args.algebra, args.n_max)
    if fmt == "dot":
        return g.to_dot()
    if fmt == "json":
        return _dump_json(g.to_json())
    if fmt == "text":
        return g.to_text()
    _unsupported(fmt, "bratelli")


def cmd_dims(args, cfg, fmt):
    from .setpart import bell, stirling2, t_count

    funcs = {"bell": (bell, 1), "stirling": (stirling2, 2), "tcount": (t_count, 2)}
    func, arity = funcs[args.what]
    if len(args.args) != arity:
        raise UsageError(f"--what {args.what} takes {arity} integer argument(s)")
    if any(a < 0 for a in args.args):
        raise DomainError("arguments must be nonnegative")
    value = func(*args.args)
    if fmt == "json":
        return _dump_json({"what": args.what, "args": list(args.args), "value": str(value)})
    if fmt == "text":
        return f"{value}\n"
    _unsupported(fmt, "dims")


def cmd_semisimple(args, cfg, fmt):
    from .reptheory import semisimplicity_verdict

    v = semisimplicity_verdict(args.algebra, args.delta, args.n)
    obj = v.to_json()
    if fmt == "json":
        return _dump_json(obj)
    if fmt == "text":
        lines = [f"semisimple for all n: {str(v.semisimple_all_n).lower()}"]
        if v.witness_n is not None:
            lines.append(f"first certified failure at n = {v.witness_n}")
        if v.n is not None:
            at = {True: "yes", False: "no", None: "undetermined"}[v.semisimple_at_n]
            lines.append(f"n = {v.n}: semisimple {at}; spine bad set {v.spine_bad_set}; "
                         f"spine simple {str(v.spine_simple_at_n).lower()}")
        lines += [f"note: {s}" for s in v.notes]
        return "\n".join(lines) + "\n"
    _unsupported(fmt, "semisimple")


def cmd_oddeven(args, cfg, fmt):
    from .spinegram import odd_even_check

    holds, e = odd_even_check(args.n)
    if fmt == "json":
        return _dump_json({"n": args.n, "holds": holds, "exponent": e})
    if fmt == "text":
        return f"holds {str(holds).lower()} exponent {e if e is not None else '-'}\n"
    _unsupported(fmt, "oddeven")


COMMANDS = {
    "enum": cmd_enum,
    "compose": cmd_compose,
    "gram": cmd_gram,
    "potts": cmd_potts,
    "bratelli": cmd_bratelli,
    "dims": cmd_dims,
    "semisimple": cmd_semisimple,
    "oddeven": cmd_oddeven,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None,
                        help="output format (default from config, else text)")
    common.add_argument("--config", default=None, help="key=value config file")

    p = _Parser(prog="partalg", description="Exact computations in partition algebras.")
    p.add_argument("--version", action="version", version=f"partalg {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("enum", parents=[common], help="list set partitions")
    s.add_argument("n", type=int)
    s.add_argument("m", type=int, nargs="?", default=0)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--even", action="store_true", help="every block of even size (m = 0)")
    g.add_argument("--tonal", type=int, metavar="D", help="keep d-tonal partitions")

    s = sub.add_parser("compose", parents=[common], help="evaluate a diagram expression")
    s.add_argument("expr")

    s = sub.add_parser("gram", parents=[common], help="spine Gram matrix or report")
    s.add_argument("--algebra", required=True, choices=["P1", "P2", "ordinary", "tonal"])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--report", action="store_true")
    s.add_argument("--smith", action="store_true")
    s.add_argument("--method", choices=["auto", "evaluation", "elimination"], default="auto")

    s = sub.add_parser("potts", parents=[common], help="Potts images, ranks and orbit counts")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--signed", action="store_true")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--rank", action="store_true")
    g.add_argument("--image", metavar="DIAGRAM")

    s = sub.add_parser("bratelli", parents=[common], help="Bratelli graph")
    s.add_argument("--algebra", required=True, choices=["P1", "P2", "ordinary", "tonal"])
    s.add_argument("--n-max", type=int, required=True)

    s = sub.add_parser("dims", parents=[common], help="Bell, Stirling and T numbers")
    s.add_argument("--what", required=True, choices=["bell", "stirling", "tcount"])
    s.add_argument("--args", type=int, nargs="+", required=True)

    s = sub.add_parser("semisimple", parents=[common], help="semisimplicity verdict")
    s.add_argument("--algebra", required=True, choices=["P1", "P2", "ordinary", "tonal"])
    s.add_argument("--delta", required=True)
    s.add_argument("--n", type=int)

    s = sub.add_parser("oddeven", parents=[common], help="odd-even Gram relation")
    s.add_argument("--n", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError) as exc:
        parser.error(f"config: {exc}")
    fmt = args.format or (cfg.output_format if args.config else None) or (
        "dot" if args.command == "bratelli" else "text")
    cap = thread_cap()
    if cap:
        from . import _kernels

        _kernels.set_thread_cap(cap)
    try:
        out = COMMANDS[args.command](args, cfg, fmt)
    except UsageError as exc:
        parser.error(str(exc))
    except PartalgError as exc:
        msg = " ".join(str(exc).split())
        sys.stderr.write(f"error: {exc.code}: {msg}\n")
        return 2
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
