"""Command-line surface for the lattice laboratory.

Subcommands: enumerate, extend, fill, tile, count, entropy, verify,
height.  Exit codes: 0 = pass, 1 = mathematical negative (a
counterexample or untileable input), 2 = usage error, 3 = search budget
exceeded.  Every output starts with a header carrying the seed, and
rerunning any command with the same arguments produces byte-identical
output regardless of the worker count.
"""

import argparse
import json
import sys

from . import entropy as entropy_mod
from . import height as height_mod
from . import homshift
from . import lattice
from . import tiling as tiling_mod
from .util import BudgetError, canonical_json

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    """Bad arguments or malformed input files."""


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _parse_pair(text, what):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError("%s must be 'u,v', got %r" % (what, text))
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError:
        raise UsageError("%s must be a pair of integers, got %r"
                         % (what, text))


def _parse_site(text):
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError("site must be comma-separated integers, got %r"
                         % (text,))


def _parse_dims(text):
    try:
        dims = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise UsageError("dims must look like 4x4, got %r" % (text,))
    if not dims or any(a < 1 for a in dims):
        raise UsageError("dims must be positive, got %r" % (text,))
    return dims


def _parse_widths(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise UsageError("widths range must be like 2..8, got %r"
                             % (text,))
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError("widths must be a range or comma list, got %r"
                         % (text,))


def _load_graph(args):
    edges_path = getattr(args, "edges", None)
    if edges_path:
        try:
            with open(edges_path, "r", encoding="utf-8") as fh:
                lines = [ln.strip() for ln in fh if ln.strip()]
            edges = []
            for ln in lines:
                u, v = ln.split()
                edges.append((int(u), int(v)))
        except (OSError, ValueError) as exc:
            raise UsageError("cannot read edge list %s: %s"
                             % (edges_path, exc))
        if not edges:
            raise UsageError("edge list %s is empty" % edges_path)
        labels = sorted({u for e in edges for u in e})
        return homshift.TargetGraph(labels, edges)
    try:
        return homshift.graph_preset(args.graph)
    except ValueError as exc:
        raise UsageError(str(exc))


def _load_tileset(args):
    try:
        return tiling_mod.tile_preset(args.tileset)
    except ValueError as exc:
        raise UsageError(str(exc))


def _marker_colors(H, args):
    v0, v1, v2 = entropy_mod.canonical_marker_triple(H)
    if args.v0 is not None:
        v0 = args.v0
    if args.v1 is not None:
        v1 = args.v1
    if args.v2 is not None:
        v2 = args.v2
    return v0, v1, v2


def _emit(args, text, summary=None):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if summary is not None:
        print(summary)


def _record(args, payload):
    rec = {"command": args.cmd, "seed": args.seed}
    rec.update(payload)
    return canonical_json(rec) + "\n"


def cmd_enumerate(args):
    H = _load_graph(args)
    n, d = args.n, args.d
    if args.family == "box":
        ps = homshift.enumerate_hom(H, lattice.box_F(n, d),
                                    workers=args.workers, budget=args.budget)
    elif args.family == "checker":
        v0, v1, _ = _marker_colors(H, args)
        ps = homshift.checkerboard_set(H, v0, v1, n, d,
                                       workers=args.workers,
                                       budget=args.budget)
    elif args.family == "tilde":
        v0, v1, v2 = _marker_colors(H, args)
        ps = homshift.marker_set(H, v0, v1, v2, n, d,
                                 workers=args.workers, budget=args.budget)
    else:
        ps = homshift.hat_set(H, n, d, budget=args.budget)
    text = homshift.pattern_set_to_jsonl(ps, H, seed=args.seed)
    _emit(args, text, "count=%d family=%s n=%d d=%d"
          % (len(ps), args.family, n, d))
    return EXIT_OK


def cmd_extend(args):
    H = _load_graph(args)
    try:
        with open(args.infile, "r", encoding="utf-8") as fh:
            ps, _ = homshift.pattern_set_from_jsonl(fh.read())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError("cannot read pattern file %s: %s"
                         % (args.infile, exc))
    if len(ps) == 0:
        raise UsageError("pattern file %s holds no patterns" % args.infile)
    extended = []
    for p in ps:
        if args.op == "path":
            if args.source is None or args.target is None:
                raise UsageError("op path needs --source and --target")
            q = homshift.path_extend(H, p, _parse_pair(args.source, "source"),
                                     _parse_pair(args.target, "target"),
                                     args.k)
        elif args.op == "embed":
            if args.target is None:
                raise UsageError("op embed needs --target")
            q = homshift.embed_in_marker(
                H, p, _parse_pair(args.target, "target"), args.k)
        else:
            _, q = homshift.hat_extend(H, p, args.k)
        extended.append(q)
    out = homshift.PatternSet(extended[0].region, extended)
    text = homshift.pattern_set_to_jsonl(out, H, seed=args.seed)
    _emit(args, text, "count=%d op=%s k=%d" % (len(out), args.op, args.k))
    return EXIT_OK


def cmd_tile(args):
    F = _load_tileset(args)
    dims = _parse_dims(args.dims)
    try:
        t = tiling_mod.tile_rectangle(F, dims)
    except ValueError as exc:
        print("untileable: %s" % exc, file=sys.stderr)
        return EXIT_NEGATIVE
    t.validate()
    text = canonical_json({"seed": args.seed,
                           "tiling": tiling_mod.tiling_to_json(t)}) + "\n"
    _emit(args, text, "tiled dims=%s tiles=%d" % (args.dims, len(t.placements)))
    return EXIT_OK


def cmd_fill(args):
    F = _load_tileset(args)
    sites = []
    blocks = {}
    if args.blocks:
        try:
            with open(args.blocks, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
            entries = raw["blocks"] if isinstance(raw, dict) else raw
            for entry in entries:
                site = tuple(entry["site"])
                sites.append(site)
                blocks[site] = tiling_mod.tiling_from_json(entry["tiling"])
        except (OSError, ValueError, KeyError, TypeError,
                json.JSONDecodeError) as exc:
            raise UsageError("cannot read blocks file %s: %s"
                             % (args.blocks, exc))
    try:
        t = tiling_mod.flexible_tile_fill(F, args.n, args.k, sites, blocks)
    except ValueError as exc:
        print("no admissible fill: %s" % exc, file=sys.stderr)
        return EXIT_NEGATIVE
    t.validate()
    text = canonical_json({"seed": args.seed,
                           "tiling": tiling_mod.tiling_to_json(t)}) + "\n"
    _emit(args, text, "filled n=%d k=%d blocks=%d"
          % (args.n, args.k, len(sites)))
    return EXIT_OK


def cmd_count(args):
    if args.what == "hom":
        H = _load_graph(args)
        value = entropy_mod.count_hom_box(H, args.n, args.d,
                                          budget=args.budget)
        params = {"what": "hom", "graph": args.graph, "n": args.n,
                  "d": args.d}
    elif args.what == "torus":
        H = _load_graph(args)
        value = entropy_mod.count_hom_torus(H, args.n, args.d)
        params = {"what": "torus", "graph": args.graph, "n": args.n,
                  "d": args.d}
    elif args.what == "tilings":
        F = _load_tileset(args)
        dims = _parse_dims(args.dims)
        value = tiling_mod.count_tilings(F, lattice.rectangle(dims),
                                         workers=args.workers,
                                         budget=args.budget)
        params = {"what": "tilings", "tileset": args.tileset,
                  "dims": list(dims)}
    else:
        dims = _parse_dims(args.dims)
        if len(dims) != 2:
            raise UsageError("dimers need two dims, got %r" % (args.dims,))
        value = entropy_mod.count_dimer_tilings_kasteleyn(dims[0], dims[1])
        params = {"what": "dimers", "dims": list(dims)}
    params["count"] = value
    _emit(args, _record(args, params))
    return EXIT_OK


def cmd_entropy(args):
    lines = ["# seed=%d" % args.seed]
    if args.what == "dimers":
        lines.append("m,n,count")
        for m in range(1, args.max + 1):
            for n in range(m, args.max + 1):
                lines.append("%d,%d,%d"
                             % (m, n,
                                entropy_mod.count_dimer_tilings_kasteleyn(
                                    m, n)))
    elif args.what == "strips":
        H = _load_graph(args)
        lines.append("width,entropy")
        for w in _parse_widths(args.widths):
            h = entropy_mod.strip_entropy(H, w, boundary=args.boundary)
            lines.append("%d,%.12g" % (w, h))
    else:
        H = _load_graph(args)
        report = entropy_mod.entropy_ratio_report(H, args.nmax, d=args.d,
                                                  budget=args.budget)
        text = "# seed=%d\n%s" % (args.seed, report.to_csv())
        _emit(args, text)
        return EXIT_OK
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _ufp_records(args, hit):
    x, y = hit
    lines = [
        canonical_json({"role": "center",
                        "region": x.region.kind_descriptor(),
                        "values": list(x.values)}),
        canonical_json({"role": "ring",
                        "region": y.region.kind_descriptor(),
                        "values": list(y.values)}),
        _record(args, {"check": "ufp", "ok": False, "M": args.M,
                       "n": args.n, "buffer": args.buffer,
                       "mode": args.mode}).rstrip("\n"),
    ]
    return "\n".join(lines) + "\n"


def cmd_verify(args):
    if args.what == "marker":
        H = _load_graph(args)
        if args.n < 1:
            raise UsageError("marker family index must be >= 1")
        v0, v1, v2 = _marker_colors(H, args)
        family = homshift.marker_set(H, v0, v1, v2, args.n - 1, args.d,
                                     workers=args.workers,
                                     budget=args.budget)
        spacing = args.n - 1
        hit = homshift.verify_marker_spacing(family, spacing)
        if hit is None:
            _emit(args, _record(args, {"check": "marker", "ok": True,
                                       "n": args.n, "d": args.d,
                                       "spacing": spacing,
                                       "members": len(family)}))
            return EXIT_OK
        _emit(args, _record(args, {"check": "marker", "ok": False,
                                   "n": args.n, "d": args.d,
                                   "spacing": spacing,
                                   "offset": list(hit[2])}))
        return EXIT_NEGATIVE
    if args.what == "ufp":
        H = _load_graph(args)
        hit = height_mod.ufp_window_check(H, args.M, args.n,
                                          buffer=args.buffer, mode=args.mode,
                                          d=args.d, workers=args.workers,
                                          budget=args.budget)
        if hit is None:
            _emit(args, _record(args, {"check": "ufp", "ok": True,
                                       "M": args.M, "n": args.n,
                                       "buffer": args.buffer,
                                       "mode": args.mode}))
            return EXIT_OK
        _emit(args, _ufp_records(args, hit))
        return EXIT_NEGATIVE
    if args.what == "tiling":
        if args.file is None:
            raise UsageError("verify tiling needs --file")
        try:
            with open(args.file, "r", encoding="utf-8") as fh:
                obj = json.load(fh)
            if "tiling" in obj:
                obj = obj["tiling"]
            t = tiling_mod.tiling_from_json(obj, validate=False)
        except (OSError, KeyError, TypeError, IndexError,
                json.JSONDecodeError) as exc:
            raise UsageError("cannot read tiling file %s: %s"
                             % (args.file, exc))
        try:
            t.validate()
        except ValueError as exc:
            _emit(args, _record(args, {"check": "tiling", "ok": False,
                                       "reason": str(exc)}))
            return EXIT_NEGATIVE
        _emit(args, _record(args, {"check": "tiling", "ok": True,
                                   "tiles": len(t.placements)}))
        return EXIT_OK
    # lipschitz: height bound on freshly sampled colorings
    region = lattice.box_F(args.n, args.d)
    base = (0,) * args.d
    for i in range(args.samples):
        seed = args.seed + i
        field = height_mod.height_cocycle(
            height_mod.sample_coloring(region, seed), base)
        bad = height_mod.lipschitz_check(field)
        if bad is not None:
            site, h, bound = bad
            _emit(args, _record(args, {"check": "lipschitz", "ok": False,
                                       "n": args.n, "d": args.d,
                                       "sample_seed": seed,
                                       "site": list(site), "height": h,
                                       "bound": bound}))
            return EXIT_NEGATIVE
    _emit(args, _record(args, {"check": "lipschitz", "ok": True,
                               "n": args.n, "d": args.d,
                               "samples": args.samples,
                               "first_seed": args.seed,
                               "last_seed": args.seed + args.samples - 1}))
    return EXIT_OK


def cmd_height(args):
    if args.what == "sample":
        region = lattice.box_F(args.n, args.d)
        p = height_mod.sample_coloring(region, args.seed)
        ps = homshift.PatternSet(region, [p])
        text = homshift.pattern_set_to_jsonl(ps, homshift.complete_graph(3),
                                             seed=args.seed)
        _emit(args, text, "sampled n=%d d=%d" % (args.n, args.d))
        return EXIT_OK
    if args.what == "cocycle":
        if args.infile is None:
            raise UsageError("height cocycle needs --in")
        try:
            with open(args.infile, "r", encoding="utf-8") as fh:
                ps, _ = homshift.pattern_set_from_jsonl(fh.read())
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError("cannot read pattern file %s: %s"
                             % (args.infile, exc))
        base = _parse_site(args.base)
        lines = [canonical_json({"seed": args.seed, "base": list(base),
                                 "count": len(ps)})]
        for p in ps:
            field = height_mod.height_cocycle(p, base)
            lines.append(canonical_json(
                {"heights": [field.heights[s] for s in p.region.sites]}))
        _emit(args, "\n".join(lines) + "\n")
        return EXIT_OK
    # gap: quasiflat gap of the two reference colorings
    region = lattice.box_F(args.n, args.d)
    samples = [height_mod.striped_coloring(region),
               height_mod.checker_coloring(region)]
    gap = height_mod.quasiflat_gap(samples, list(region))
    _emit(args, _record(args, {"check": "quasiflat_gap", "n": args.n,
                               "d": args.d, "gap": gap}))
    return EXIT_OK


def _add_common(sub, out=True):
    sub.add_argument("--seed", type=int, default=0,
                     help="seed recorded in output headers (default 0)")
    sub.add_argument("--budget", type=_positive, default=None,
                     help="search node budget (default from environment)")
    sub.add_argument("--workers", type=_positive, default=1,
                     help="parallel worker count (default 1)")
    if out:
        sub.add_argument("--out", default=None,
                         help="output file (default stdout)")


def _add_graph(sub):
    sub.add_argument("--graph", default="K3",
                     help="named graph preset (default K3)")
    sub.add_argument("--edges", default=None,
                     help="edge list file: one 'u v' pair per line")


def _add_colors(sub):
    sub.add_argument("--v0", type=int, default=None)
    sub.add_argument("--v1", type=int, default=None)
    sub.add_argument("--v2", type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="latticelab",
        description="pattern families, tilings, entropy counts and height "
                    "checks on small lattice windows")
    subs = parser.add_subparsers(dest="cmd", required=True)

    p = subs.add_parser("enumerate", help="enumerate a pattern family")
    _add_graph(p)
    _add_colors(p)
    p.add_argument("--family", choices=["box", "checker", "tilde", "hat"],
                   default="box")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = subs.add_parser("extend", help="extend patterns from a file")
    _add_graph(p)
    p.add_argument("--op", choices=["path", "embed", "hat"], required=True)
    p.add_argument("--in", dest="infile", required=True,
                   help="pattern file from 'enumerate'")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--source", default=None, help="edge 'u,v' (op path)")
    p.add_argument("--target", default=None,
                   help="edge 'u,v' (ops path and embed)")
    _add_common(p)
    p.set_defaults(func=cmd_extend)

    p = subs.add_parser("tile", help="tile a rectangle")
    p.add_argument("--tileset", default="dominoes")
    p.add_argument("--dims", required=True, help="like 4x4")
    _add_common(p)
    p.set_defaults(func=cmd_tile)

    p = subs.add_parser("fill", help="tile a box around prescribed blocks")
    p.add_argument("--tileset", default="dominoes")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--blocks", default=None,
                   help="JSON file of {site, tiling} blocks")
    _add_common(p)
    p.set_defaults(func=cmd_fill)

    p = subs.add_parser("count", help="exact counts")
    p.add_argument("what", choices=["hom", "torus", "tilings", "dimers"])
    _add_graph(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--tileset", default="dominoes")
    p.add_argument("--dims", default="4x4")
    _add_common(p)
    p.set_defaults(func=cmd_count)

    p = subs.add_parser("entropy", help="entropy tables")
    p.add_argument("what", choices=["dimers", "strips", "ratio"])
    _add_graph(p)
    p.add_argument("--max", type=_positive, default=8,
                   help="largest side for the dimer table")
    p.add_argument("--widths", default="1..8",
                   help="strip widths, like 2..8 or 2,4,6")
    p.add_argument("--boundary", choices=["free", "periodic"],
                   default="free")
    p.add_argument("--nmax", type=_positive, default=2,
                   help="largest box index for the ratio table")
    p.add_argument("--d", type=int, default=2)
    _add_common(p)
    p.set_defaults(func=cmd_entropy)

    p = subs.add_parser("verify", help="run a checker, exit 1 on negatives")
    p.add_argument("what", choices=["marker", "ufp", "tiling", "lipschitz"])
    _add_graph(p)
    _add_colors(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--buffer", type=_positive, default=1)
    p.add_argument("--mode", choices=["targeted", "exhaustive"],
                   default="targeted")
    p.add_argument("--file", default=None, help="tiling JSON to validate")
    p.add_argument("--samples", type=_positive, default=100)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("height", help="height-field utilities")
    p.add_argument("what", choices=["sample", "cocycle", "gap"])
    p.add_argument("--n", type=_positive, default=3)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--in", dest="infile", default=None,
                   help="pattern file (what=cocycle)")
    p.add_argument("--base", default="0,0", help="base site 'i,j'")
    _add_common(p)
    p.set_defaults(func=cmd_height)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print("budget exceeded: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, ArithmeticError) as exc:
        print("negative result: %s" % exc, file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
