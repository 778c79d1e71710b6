"""Command-line surface: solving games, single-turn equilibria, table
inspection, fixture verification, self-play simulation, and the HTTP
server.

All analysis output is a single JSON document on stdout with a fixed
field order and floats printed to 9 significant digits; errors go to
stderr as JSON.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dag_solver, equilibrium, oracle
from .errors import BidsolveError, DegenerateChips
from .game_graph import GameGraph, PLAYER_A, PLAYER_B, ChipState, load_graph_file, graph_hash, race_graph, tictactoe_graph
from .payoff_matrix import ToeplitzPayoff, adjust_precision, opponent_matrix

CACHE_ENV = "BIDSOLVE_CACHE_DIR"


def select_game(selector: str) -> GameGraph:
    """``race:k,m`` | ``ttt`` | ``file:<path>``."""
    if selector == "ttt":
        return tictactoe_graph()
    if selector.startswith("race:"):
        try:
            k, m = (int(part) for part in selector[5:].split(","))
        except ValueError:
            raise BidsolveError(f"bad race selector {selector!r}; want race:k,m") from None
        return race_graph(k, m)
    if selector.startswith("file:"):
        return load_graph_file(selector[5:])
    raise BidsolveError(f"unknown game selector {selector!r}")


def _nine_digits(obj):
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: _nine_digits(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_nine_digits(v) for v in obj]
    if isinstance(obj, np.floating):
        return float(f"{float(obj):.9g}")
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def emit(payload: dict) -> None:
    print(json.dumps(_nine_digits(payload)))


def _cache_path(g: GameGraph, chips: int, x: float, strategies: bool) -> str | None:
    cache_dir = os.environ.get(CACHE_ENV)
    if not cache_dir:
        return None
    os.makedirs(cache_dir, exist_ok=True)
    suffix = "s" if strategies else "v"
    name = f"{graph_hash(g)[:16]}_n{chips}_x{x:.3g}_{suffix}.npz"
    return os.path.join(cache_dir, name)


def solve_with_cache(g: GameGraph, chips: int, x: float, strategies: bool) -> dag_solver.ValueTable:
    path = _cache_path(g, chips, x, strategies)
    if path and os.path.exists(path):
        return dag_solver.load_table(path, graph=g)
    table = dag_solver.solve_game(g, chips, x=x, store_strategies=strategies)
    if path:
        dag_solver.save_table(table, path, graph=g)
    return table


def cmd_solve(args) -> int:
    g = select_game(args.game)
    x = args.x if args.x is not None else dag_solver.default_precision(g, args.chips)
    table = solve_with_cache(g, args.chips, x, args.strategies)
    if args.out:
        dag_solver.save_table(table, args.out, graph=g)
    root_values = table.values[table.index[g.root]]
    emit(
        {
            "command": "solve",
            "game": args.game,
            "chips": args.chips,
            "x": x,
            "root": g.root,
            "graph_hash": table.graph_hash,
            "error_bound": g.max_depth * x * args.chips,
            "values": list(root_values),
            "win_probabilities": [round(min(max(v, 0.0), 1.0), 6) for v in root_values],
            "lengths": [int(v) for v in table.lengths[table.index[g.root]]],
        }
    )
    return 0


def cmd_eq(args) -> int:
    with open(args.matrix, "r", encoding="utf-8") as fh:
        m = ToeplitzPayoff.from_json(json.load(fh))
    if args.x is not None:
        m = adjust_precision(m, args.x, ChipState(m.cols - 1, m.rows - 1))
    result = equilibrium.solve_turn(m)
    emit(
        {
            "value": result.value,
            "length": result.length,
            "s_a": list(result.s_a.probs),
            "s_b": list(result.s_b.probs),
            "best_response_gap": result.best_response_gap,
        }
    )
    return 0


def cmd_table(args) -> int:
    table, _ = dag_solver.load_table_bundle(args.input)
    if args.vertex not in table.index:
        raise BidsolveError(f"vertex {args.vertex!r} not in table")
    row = table.index[args.vertex]
    values = table.values[row]
    lengths = table.lengths[row]
    if args.format == "csv":
        print("a,value,length")
        for a in range(table.total + 1):
            print(f"{a},{values[a]:.9g},{int(lengths[a])}")
    else:
        emit(
            {
                "vertex": args.vertex,
                "total": table.total,
                "x": table.x,
                "values": list(values),
                "lengths": [int(v) for v in lengths],
            }
        )
    return 0


def cmd_verify(args) -> int:
    with open(args.fixture, "r", encoding="utf-8") as fh:
        fixture = json.load(fh)
    m = ToeplitzPayoff.from_json(fixture["matrix"])
    s_a = equilibrium.Strategy(np.asarray(fixture["s_a"], dtype=float))
    s_b = equilibrium.Strategy(np.asarray(fixture["s_b"], dtype=float))
    report = equilibrium.verify_equilibrium(m, s_a, s_b)
    emit(
        {
            "value": report.value,
            "equalization_deviation": report.equalization_deviation,
            "gap_advantage": report.gap_advantage,
            "gap_opponent": report.gap_opponent,
            "best_response_gap": report.best_response_gap,
            "gap_free": report.gap_free,
            "bids_zero": report.bids_zero,
            "opponent_bids_one": report.opponent_bids_one,
            "passed": report.passed,
        }
    )
    return 0 if report.passed else 1


def cmd_simulate(args) -> int:
    table, graph = dag_solver.load_table_bundle(args.table)
    if graph is None:
        if not args.game:
            raise BidsolveError("table has no embedded graph; pass --game")
        graph = select_game(args.game)
        dag_solver.load_table(args.table, graph=graph)  # hash check
    vertex = args.vertex or graph.root
    result = oracle.simulate(graph, table, vertex, args.chips_a, args.trials, args.seed)
    emit(
        {
            "vertex": vertex,
            "chips_a": args.chips_a,
            "trials": args.trials,
            "seed": args.seed,
            "wins": result.wins,
            "win_rate": result.win_rate,
            "std_error": result.std_error,
            "table_value": table.value(vertex, args.chips_a),
        }
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api_server import create_app

    app = create_app(
        game=args.game,
        chips_total=args.chips,
        x=args.x,
        pretable=args.pretable,
        snapshot_dir=args.snapshot_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bidsolve",
        description="All-pay bidding game solver and play service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a game and print root values")
    p.add_argument("--game", required=True)
    p.add_argument("--chips", required=True, type=_nonneg_int)
    p.add_argument("--x", type=_positive_float, default=None)
    p.add_argument("--out", default=None, help="save the table (npz)")
    p.add_argument("--strategies", action="store_true", help="store strategies in the table")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eq", help="single-turn equilibrium of a matrix JSON")
    p.add_argument("--matrix", required=True)
    p.add_argument("--x", type=_positive_float, default=None)
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("table", help="dump one vertex's value row")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--vertex", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="check an equilibrium fixture")
    p.add_argument("--fixture", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo self-play from a solved table")
    p.add_argument("--table", required=True)
    p.add_argument("--game", default=None)
    p.add_argument("--vertex", default=None)
    p.add_argument("--chips-a", required=True, type=_nonneg_int)
    p.add_argument("--trials", required=True, type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the interactive play API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--game", default="ttt")
    p.add_argument("--chips", type=_nonneg_int, default=200)
    p.add_argument("--x", type=_positive_float, default=None)
    p.add_argument("--pretable", default=None, help="preload a solved table bundle")
    p.add_argument("--snapshot-dir", default=None, help="persist session snapshots here")
    p.set_defaults(func=cmd_serve)

    return parser


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BidsolveError, DegenerateChips, FileNotFoundError, json.JSONDecodeError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
