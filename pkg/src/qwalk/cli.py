"""
Command-line interface.

    qwalk generate --topology chain --stars 11 --spokes 450 --seed 3 --out maze.json
    qwalk curve    --maze maze.json --init connection:5 --target 6 --max-steps 100 --out c.csv
    qwalk recover  --maze maze.json --strategy successive --trials 500 --seed 1 --out r.json
    qwalk verify   --suite all

Exit status: 0 on success, 1 on usage errors, 2 when a verification suite fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import analytic as an
from .maze import MazeError, build_maze, load_maze, maze_to_json, reveal_path
from .recovery import RecoveryConfig, StrategyError, run_trials, summarize
from .verify import SUITES, run_suite
from .walk import (
    LocalizedConnection,
    LocalizedStart,
    SuperposedInit,
    TwoStar,
    connection_amplitudes,
    connection_probability,
    evolve,
    prepare,
)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2

CURVE_COLUMNS = ("steps", "p_simulated", "p_exact", "p_bessel", "e_plus", "e_minus")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args) -> int:
    if args.stars < 1:
        raise UsageError("--stars must be at least 1")
    maze = build_maze(args.topology, args.stars, args.spokes, args.seed)
    _write_atomic(args.out, maze_to_json(maze))
    print(f"wrote {args.out}: {maze.topology} M={maze.M} N={maze.N} seed={maze.seed} "
          f"({maze.dim} directed edge states)")
    if args.reveal:
        print("path: " + " -> ".join(reveal_path(maze)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# curve


def _parse_init(text: str):
    kind, _, arg = text.partition(":")
    if kind == "start" and not arg:
        return "start", None
    if kind == "superposed" and not arg:
        return "superposed", None
    if kind in ("connection", "two-star") and arg.isdigit():
        return kind, int(arg)
    raise UsageError(f"bad --init {text!r}; expected start, connection:K, superposed or two-star:J")


def curve_rows(maze, init: str, target: int, max_steps: int) -> list:
    """Rows of ``(steps, p_simulated, p_exact, p_bessel, e_plus, e_minus)``.

    ``p_exact`` and ``p_bessel`` are ``None`` where no closed form applies.
    ``e_plus`` and ``e_minus`` are the simulated success amplitudes.
    """
    kind, arg = _parse_init(init)
    if target not in maze.junctions():
        raise UsageError(f"--target {target} is not a junction of this maze")
    if max_steps < 0:
        raise UsageError("--max-steps must be non-negative")
    M, N = maze.M, maze.N
    try:
        if kind == "start":
            p = LocalizedStart()
        elif kind == "connection":
            p = LocalizedConnection(arg)
        elif kind == "superposed":
            if not maze.is_chain:
                raise UsageError("superposed init needs a chain maze")
            p = SuperposedInit()
        else:
            p = TwoStar(arg)
        state = prepare(maze, p)
    except MazeError as exc:
        raise UsageError(str(exc)) from None

    exact = bessel = None
    if kind in ("start", "connection") and maze.is_chain:
        k = 0 if kind == "start" else arg
        b = target - k

        def exact(steps):
            return an._chain_p(an.chain_amplitude(M, N, k, b, steps), M, k, b)

        def bessel(steps):
            a = an.chain_amplitude_approx(M, N, k, b, steps)
            return a * a if target in (0, M) else 2 * a * a
    elif kind == "connection":
        spec = an.RingSpectrum(M, N)
        b = (target - arg) % M

        def exact(steps):
            return an.ring_psuc(spec, b, steps)

        def bessel(steps):
            a = an.ring_amplitude_approx(min(b, M - b), steps // 2, maze.t)
            return 2 * a * a
    elif kind == "superposed":
        model = an.ReducedGroverModel(N)
        weight = 1 / (2 * M) if target in (0, M) else 1 / M

        def exact(steps):
            return weight * an.grover_psuc(model, steps, from_superposed=True)

    rows = []
    for steps in range(0, max_steps + 1, 2):
        if steps:
            state = evolve(maze, state, 2)
        e_plus, e_minus = connection_amplitudes(maze, state, target)
        rows.append((
            steps,
            connection_probability(maze, state, target),
            exact(steps) if exact else None,
            bessel(steps) if bessel else None,
            e_plus,
            e_minus,
        ))
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def curve_csv(maze, init: str, target: int, max_steps: int) -> str:
    rows = curve_rows(maze, init, target, max_steps)
    lines = [f"# success probability on junction {target} vs steps; {maze.topology} "
             f"M={maze.M} N={maze.N} init={init}",
             ",".join(CURVE_COLUMNS)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_curve(args) -> int:
    maze = load_maze(args.maze)
    _write_atomic(args.out, curve_csv(maze, args.init, args.target, args.max_steps))
    return EXIT_OK


# ---------------------------------------------------------------------------
# recover


def cmd_recover(args) -> int:
    maze = load_maze(args.maze)
    config = RecoveryConfig(
        strategy=args.strategy.replace("-", "_"),
        max_rounds_per_stage=args.max_rounds,
        trials=args.trials,
        master_seed=args.seed,
        step_override=args.steps,
    )
    try:
        results = run_trials(maze, config)
    except StrategyError as exc:
        raise UsageError(str(exc)) from None
    summary = summarize(results)
    doc = {
        "maze": {"topology": maze.topology, "M": maze.M, "N": maze.N, "seed": maze.seed},
        "config": {
            "strategy": config.strategy,
            "max_rounds_per_stage": config.max_rounds_per_stage,
            "trials": config.trials,
            "master_seed": config.master_seed,
            "step_override": config.step_override,
        },
        "summary": summary,
        "results": [r.to_dict() for r in results],
    }
    _write_atomic(args.out, json.dumps(doc, indent=1) + "\n")
    width = max(len(k) for k in summary)
    for key, val in summary.items():
        print(f"{key:<{width}}  {val:.6g}" if isinstance(val, float) else f"{key:<{width}}  {val}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = [run_suite(name) for name in names]
    doc = {
        "passed": all(r.passed for r in reports),
        "suites": [r.to_dict() for r in reports],
    }
    text = json.dumps(doc, indent=1) + "\n"
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.suite}: {r.cases} cases, max residual {r.max_residual:.3e}",
              file=sys.stderr)
    return EXIT_OK if doc["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwalk", description="Quantum-walk path finding on chains of stars.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a maze JSON file")
    g.add_argument("--topology", choices=("chain", "ring"), default="chain")
    g.add_argument("--stars", type=int, required=True)
    g.add_argument("--spokes", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--reveal", action="store_true", help="print the hidden path")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("curve", help="success probability vs. steps as CSV")
    c.add_argument("--maze", required=True)
    c.add_argument("--init", required=True, help="start | connection:K | superposed | two-star:J")
    c.add_argument("--target", type=int, required=True)
    c.add_argument("--max-steps", type=int, default=100)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_curve)

    r = sub.add_parser("recover", help="Monte Carlo path recovery")
    r.add_argument("--maze", required=True)
    r.add_argument("--strategy", required=True,
                   choices=("superposed", "successive", "unknown-start", "classical"))
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--max-rounds", type=int, default=50)
    r.add_argument("--steps", type=int, default=None, help="override the step count per round")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_recover)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", required=True, choices=tuple(SUITES) + ("all",))
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MazeError, ValueError, OSError) as exc:
        print(f"qwalk {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
