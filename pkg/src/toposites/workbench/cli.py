"""Command line entry point: ``toposites classify|enumerate|bridge|selftest``."""
from __future__ import annotations

import argparse
import sys

from ..fincat import ValidationError
from .bridge import bridge_check
from .enumerate import BoundsError, enumerate_categories, enumerate_topologies
from .report import FAILURE, classify_site, dumps
from .siteio import load_site
from .sweep import BoundsConfigError, selftest

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def _open_out(path):
    return open(path, "w") if path else sys.stdout


def cmd_classify(args) -> int:
    site = load_site(args.site)
    rep = classify_site(site.category, site.topology, site.id)
    out = _open_out(args.report)
    try:
        out.write(rep.to_json() + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if args.report:
        print(f"{rep.site}: {rep.status}")
        for name, row in rep.rows.items():
            print(f"  {name:<18} criterion={row.criterion!s:<5} oracle={row.oracle!s:<5} "
                  f"agree={row.agree}")
    return EXIT_FAILED if rep.status == FAILURE else EXIT_OK


def cmd_enumerate(args) -> int:
    for cid, C in enumerate_categories(args.max_objects, args.max_arrows):
        rec = {"kind": "category", "id": cid, "objects": len(C.objects),
               "arrows": len(C.arrows), "category": C.to_dict()}
        if args.topologies:
            tops = enumerate_topologies(C)
            rec["topologies"] = [J.to_dict()["covers"] for J in tops]
        print(dumps(rec))
    return EXIT_OK


def cmd_bridge(args) -> int:
    site = load_site(args.site)
    D = [x for x in args.subcategory.split(",") if x]
    v = bridge_check(site.category, site.topology, D, site.id)
    print(dumps(v.record(site.id)))
    if v.dense and not v.agree:
        return EXIT_FAILED
    return EXIT_OK


def cmd_selftest(args) -> int:
    out = _open_out(args.report)
    try:
        ok = selftest(out, sys.stderr)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toposites",
                                description="Classify finite sites by topos invariants.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify one site file")
    c.add_argument("--site", required=True, help="site JSON file")
    c.add_argument("--report", help="write the JSON-lines report here instead of stdout")
    c.set_defaults(func=cmd_classify)

    e = sub.add_parser("enumerate", help="list categories up to isomorphism")
    e.add_argument("--max-objects", type=int, required=True)
    e.add_argument("--max-arrows", type=int, required=True)
    e.add_argument("--topologies", action="store_true", help="also list every topology")
    e.set_defaults(func=cmd_enumerate)

    b = sub.add_parser("bridge", help="compare a site with a full subcategory")
    b.add_argument("--site", required=True)
    b.add_argument("--subcategory", required=True, help="comma separated object names")
    b.set_defaults(func=cmd_bridge)

    s = sub.add_parser("selftest", help="run the exhaustive corpus sweep")
    s.add_argument("--report", help="write the JSON-lines report here instead of stdout")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, BoundsError, BoundsConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
