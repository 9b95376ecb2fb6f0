"""Command line interface.

Exit codes: 0 success (or query hit), 1 query miss or verification diff,
2 usage error, 3 I/O or file format error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO

from . import bench as benchmod
from .builder import DET, MC, MODES, NAMINGS, RECT, SQUARE, build, enumerate_locations
from .image import Image, ImageFormatError, color_token, load_image, parse_color
from .index import IndexFormatError, load_index, save_index
from .naming import SignatureCollisionError
from .oracle import DEFAULT_GUARD, OracleSizeError, condition_disagreements, oracle_report
from .rectangles import VARIANTS, default_workers
from .squares import SQUARE_VARIANTS

EXIT_OK = 0
EXIT_MISS = 1
EXIT_USAGE = 2
EXIT_IO = 3

U64_MAX = (1 << 64) - 1


class UsageError(Exception):
    pass


@dataclass
class Config:
    """Validated options of one invocation."""

    command: str
    input: Optional[str] = None
    output: Optional[str] = None
    index: Optional[str] = None
    mode: str = RECT
    naming: str = MC
    seed: Optional[int] = None
    report: bool = False
    workers: Optional[int] = None
    guard: int = DEFAULT_GUARD
    variant: Optional[str] = None
    colors: Optional[List[int]] = None
    fmt: str = "tsv"
    ms: Optional[List[int]] = None
    ns: Optional[List[Optional[int]]] = None
    sigmas: Optional[List[int]] = None
    runs: int = 5
    rows: int = 0
    cols: int = 0
    sigma: int = 0
    letters: bool = False
    verify_modes: Optional[List[str]] = None

    def validate(self) -> "Config":
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.naming not in NAMINGS:
            raise UsageError(f"unknown naming {self.naming!r}")
        if self.seed is not None and not 0 <= self.seed <= U64_MAX:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if self.workers is not None:
            if self.workers < 1:
                raise UsageError("--workers must be at least 1")
            if self.mode == SQUARE and self.workers > 1:
                raise UsageError("square mode runs a single sweep; --workers must be 1")
        if self.guard < 1:
            raise UsageError("--guard must be positive")
        if self.variant is not None:
            allowed = VARIANTS if self.mode == RECT else SQUARE_VARIANTS
            if self.variant not in allowed:
                raise UsageError(f"--variant for {self.mode} mode must be one of {', '.join(allowed)}")
        if self.command == "query" and not self.colors:
            raise UsageError("--colors needs at least one color")
        if self.runs < 1:
            raise UsageError("--runs must be positive")
        if self.command == "generate":
            if min(self.rows, self.cols, self.sigma) < 1:
                raise UsageError("--rows, --cols and --sigma must be positive")
            if self.letters and self.sigma > 26:
                raise UsageError("--letters needs --sigma <= 26")
        if self.command == "bench":
            for v in (self.ms or []) + (self.sigmas or []) + [n for n in self.ns or [] if n]:
                if v < 1:
                    raise UsageError("bench sizes must be positive")
        return self

    @property
    def worker_count(self) -> int:
        return self.workers if self.workers is not None else default_workers()


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _color_list(text: str) -> List[int]:
    try:
        return [parse_color(x) for x in text.split(",") if x.strip()]
    except ImageFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="colorsets", description="Color-set fingerprints of maximal rectangles and squares.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--mode", choices=MODES, default=RECT)
        sp.add_argument("--variant", help="sweep variant (rect: column-index|parallel-rows; "
                                          "square: parallel-diagonals|column-index)")
        sp.add_argument("--workers", type=int, help="worker processes (default: all CPUs)")

    b = sub.add_parser("build", help="build an index file")
    b.add_argument("--input", required=True)
    b.add_argument("--output", required=True)
    common(b)
    b.add_argument("--naming", choices=NAMINGS, default=MC)
    b.add_argument("--seed", type=int)
    b.add_argument("--report", action="store_true", help="keep every location for reporting")

    q = sub.add_parser("query", help="look up a color set")
    q.add_argument("--index", required=True)
    q.add_argument("--colors", required=True, type=_color_list)
    q.add_argument("--report", action="store_true")

    e = sub.add_parser("enumerate", help="list maximal locations with their colors")
    e.add_argument("--input", required=True)
    e.add_argument("--output")
    common(e)
    e.add_argument("--format", dest="fmt", choices=("tsv", "json"), default="tsv")

    v = sub.add_parser("verify", help="compare the fast path with brute force")
    v.add_argument("--input", required=True)
    v.add_argument("--mode", choices=MODES + ("both",), default="both")
    v.add_argument("--guard", type=int, default=DEFAULT_GUARD, help="largest m*n the oracle accepts")

    s = sub.add_parser("stats", help="describe an index file")
    s.add_argument("--index", required=True)

    bn = sub.add_parser("bench", help="CSV of build times on seeded random images")
    common(bn)
    bn.add_argument("--m", dest="ms", type=_int_list, default=[64, 128])
    bn.add_argument("--n", dest="ns", type=_int_list, help="columns (default: n = m)")
    bn.add_argument("--sigma", dest="sigmas", type=_int_list, default=[8, 16])
    bn.add_argument("--runs", type=int, default=5)
    bn.add_argument("--seed", type=int, default=1)
    bn.add_argument("--output")

    g = sub.add_parser("generate", help="write a seeded random image")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--sigma", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--letters", action="store_true")
    g.add_argument("--output")
    return p


def parse_config(argv: Sequence[str]) -> Config:
    ns = vars(make_parser().parse_args(list(argv)))
    if ns["command"] == "verify":
        chosen = ns.pop("mode")
        ns["verify_modes"] = list(MODES) if chosen == "both" else [chosen]
    fields = Config.__dataclass_fields__
    return Config(**{k: v for k, v in ns.items() if k in fields}).validate()


def _read_image(path: str) -> Image:
    with open(path, "rb") as fh:
        return load_image(fh.read())


def _emit(text: str, path: Optional[str], stdout: TextIO) -> None:
    if path:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _tokens(colors, letters: bool) -> List[str]:
    return [color_token(c, letters) for c in colors]


def cmd_build(cfg: Config, out: TextIO) -> int:
    image = _read_image(cfg.input)
    result = build(image, cfg.mode, naming=cfg.naming, seed=cfg.seed, report=cfg.report,
                   variant=cfg.variant, workers=cfg.worker_count if cfg.mode == RECT else 1)
    save_index(result.index, cfg.output)
    return EXIT_OK


def cmd_query(cfg: Config, out: TextIO) -> int:
    index = load_index(cfg.index)
    if cfg.report and not index.report:
        raise UsageError("index was built without --report")
    if cfg.report:
        rects = index.query_report(cfg.colors)
        for r in rects:
            out.write(f"{r.i0} {r.i1} {r.j0} {r.j1}\n")
        return EXIT_OK if rects else EXIT_MISS
    return EXIT_OK if index.query_exists(cfg.colors) else EXIT_MISS


def cmd_enumerate(cfg: Config, out: TextIO) -> int:
    image = _read_image(cfg.input)
    found = enumerate_locations(image, cfg.mode, variant=cfg.variant,
                                workers=cfg.worker_count if cfg.mode == RECT else 1)
    if cfg.fmt == "json":
        key = "rect" if cfg.mode == RECT else "square"
        doc = [{key: list(f.key), "colors": _tokens(f.colors, image.letters)} for f in found]
        text = json.dumps(doc, separators=(",", ":")) + "\n"
    else:
        text = "".join("\t".join([*map(str, f.key), ",".join(_tokens(f.colors, image.letters))]) + "\n"
                       for f in found)
    _emit(text, cfg.output, out)
    return EXIT_OK


def verify_image(image: Image, modes: Sequence[str], guard: int) -> List[str]:
    """Diff lines between every fast path and brute force; empty when they agree."""
    lines: List[str] = []
    for mode in modes:
        oracle = oracle_report(image, squares=mode == SQUARE, guard=guard)
        expected = oracle.squares if mode == SQUARE else oracle.locations
        for variant in (VARIANTS if mode == RECT else SQUARE_VARIANTS):
            fast = {(f.key, f.colors) for f in enumerate_locations(image, mode, variant=variant)}
            for item in sorted(expected - fast):
                lines.append(f"{mode} {variant} oracle-only {item[0]} {item[1]}")
            for item in sorted(fast - expected):
                lines.append(f"{mode} {variant} fast-only {item[0]} {item[1]}")
        if mode == SQUARE:
            for sq in condition_disagreements(image, guard):
                lines.append(f"square condition-formula disagrees at {sq}")
    return lines


def cmd_verify(cfg: Config, out: TextIO) -> int:
    image = _read_image(cfg.input)
    modes = cfg.verify_modes
    lines = verify_image(image, modes, cfg.guard)
    for line in lines:
        out.write(line + "\n")
    if lines:
        return EXIT_MISS
    out.write(f"ok {image.m}x{image.n} sigma={image.sigma} modes={','.join(modes)}\n")
    return EXIT_OK


def cmd_stats(cfg: Config, out: TextIO) -> int:
    index = load_index(cfg.index)
    img = index.image
    m, n = (img.n, img.m) if index.transposed else (img.m, img.n)
    rows = [("fingerprints", len(index)), ("locations", index.total_locations),
            ("mode", SQUARE if index.square else RECT), ("naming", DET if index.deterministic else MC),
            ("report", str(index.report).lower()), ("m", m), ("n", n), ("sigma", img.sigma),
            ("transposed", str(index.transposed).lower()), ("r", index.r)]
    for k, v in rows:
        out.write(f"{k}\t{v}\n")
    return EXIT_OK


def cmd_bench(cfg: Config, out: TextIO) -> int:
    timings = benchmod.grid(cfg.mode, cfg.ms, cfg.ns or [None], cfg.sigmas, cfg.runs,
                            cfg.seed or 0, cfg.worker_count if cfg.mode == RECT else 1)
    text = benchmod.Timing.CSV_HEADER + "\n" + "".join(t.csv() + "\n" for t in timings)
    _emit(text, cfg.output, out)
    return EXIT_OK


def cmd_generate(cfg: Config, out: TextIO) -> int:
    image = benchmod.generate_image(cfg.rows, cfg.cols, cfg.sigma, cfg.seed or 0, cfg.letters)
    _emit(image.to_text(), cfg.output, out)
    return EXIT_OK


COMMANDS = {"build": cmd_build, "query": cmd_query, "enumerate": cmd_enumerate,
            "verify": cmd_verify, "stats": cmd_stats, "bench": cmd_bench, "generate": cmd_generate}


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
         stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return COMMANDS[cfg.command](cfg, stdout)
    except UsageError as exc:
        stderr.write(f"colorsets: usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except OracleSizeError as exc:
        stderr.write(f"colorsets: {exc}\n")
        return EXIT_USAGE
    except (OSError, ImageFormatError, IndexFormatError) as exc:
        stderr.write(f"colorsets: {exc}\n")
        return EXIT_IO
    except SignatureCollisionError as exc:
        stderr.write(f"colorsets: {exc}\n")
        return EXIT_MISS


def run(argv: Sequence[str]) -> int:
    return main(argv)
