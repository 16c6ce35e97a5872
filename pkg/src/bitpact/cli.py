"""Command-line front end.

Subcommands: simulate | compare | ode | bounds | mpc-demo | selfcheck.

Configuration precedence: command-line flags > config file (key=value
lines, keys spelled like the long flags) > environment (BITPACT_SEED as
a fallback seed) > built-in defaults.  Every subcommand is
deterministic given --seed.

Exit codes: 0 success, 1 self-check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager

import numpy as np

from bitpact import csvio, mpc
from bitpact.analysis import (
    DriftModel,
    hitting_time_bound,
    hitting_time_bound_generic,
    integrate_ode,
    lower_bound_p,
    ode_hitting_time,
    p_of_x,
    signed_flip_identity,
    hypergeom_flip_prob,
)
from bitpact.bitstring import BitString, make_pair_with_agreement
from bitpact.circuit import build_count_circuit, build_threshold_circuit, evaluate_plain
from bitpact.protocol import (
    MODE_ORACLE,
    MODE_SECURE,
    ProtocolParams,
    run_monte_carlo,
    run_session,
)
from bitpact.randomness import LocalRng, SharedSeed, derive_seed

EXIT_OK = 0
EXIT_SELFCHECK = 1
EXIT_USAGE = 2

_DEFAULT_SEED = 1


class UsageError(Exception):
    pass


def _parse_seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise UsageError(f"seed must be a decimal or 0x-prefixed integer, got {text!r}")


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    config: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, value = line.split("=", 1)
                config[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    return config


def _resolve(args, config: dict[str, str], name: str, default, cast):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        raw = config[name]
        try:
            return cast(raw)
        except (ValueError, UsageError):
            raise UsageError(f"config value {name}={raw!r} is not valid")
    return default


def _resolve_seed(args, config) -> int:
    if getattr(args, "seed", None) is not None:
        return _parse_seed(args.seed)
    if "seed" in config:
        return _parse_seed(config["seed"])
    env = os.environ.get("BITPACT_SEED")
    if env is not None:
        return _parse_seed(env)
    return _DEFAULT_SEED


@contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _parse_list(text: str, cast):
    try:
        return [cast(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitpact",
        description="Two-party bit-agreement protocol simulator and analysis suite.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--seed", help="64-bit shared seed, decimal or 0x hex")
        p.add_argument("--out", help="output CSV path (default stdout)")
        p.add_argument("--plot", help="also render a figure to this file")

    p = sub.add_parser("simulate", help="run one protocol session, emit the trace CSV")
    common(p)
    p.add_argument("--n", type=int, help="string length")
    p.add_argument("--k", type=int, help="sample size per step")
    p.add_argument("--l", type=int, help="flip size per step")
    p.add_argument("--steps", type=int, help="number of protocol steps T")
    p.add_argument("--r", type=int, help="disagreement threshold (default ceil(k/2))")
    p.add_argument("--mode", choices=[MODE_ORACLE, MODE_SECURE], help="threshold test mode")
    p.add_argument("--x0", type=float, help="initial agreement density")
    p.add_argument("--init-a", dest="init_a", help="explicit initial string for party 0")
    p.add_argument("--init-b", dest="init_b", help="explicit initial string for party 1")

    p = sub.add_parser("compare", help="Monte Carlo vs ODE on an aligned time grid")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--steps", type=int, help="steps per trial (default 5n)")
    p.add_argument("--x0", type=float, help="initial agreement density")
    p.add_argument("--trials", type=int, help="Monte Carlo trials (default 11)")
    p.add_argument("--dt", type=float, help="ODE step size (default 1e-3)")

    p = sub.add_parser("ode", help="integrate the deterministic density trajectory")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--x0", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--dt", type=float)

    p = sub.add_parser("bounds", help="hitting-time bound table with self-check")
    common(p)
    p.add_argument("--k-values", dest="k_values", help="comma list (default 2,3,5)")
    p.add_argument("--l-values", dest="l_values", help="comma list (default 1,2)")
    p.add_argument("--x0-values", dest="x0_values", help="comma list (default 0.05,0.1,0.2)")
    p.add_argument(
        "--hx-targets",
        dest="hx_targets",
        help="comma list of target densities h*x0 (default 0.2,0.4,0.6)",
    )
    p.add_argument("--dt", type=float, help="ODE step for measured hitting times")

    p = sub.add_parser("mpc-demo", help="one secure evaluation with full accounting")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int, help="agreement threshold (default ceil(k/2))")
    p.add_argument("--circuit", choices=["threshold", "count"], help="which function to evaluate")
    p.add_argument("--input-a", dest="input_a", help="party A bits (ASCII 0/1)")
    p.add_argument("--input-b", dest="input_b", help="party B bits (ASCII 0/1)")

    p = sub.add_parser("selfcheck", help="fast internal consistency battery")
    common(p)

    return parser


def _session_inputs(args, config, n, seed_value):
    x0 = _resolve(args, config, "x0", None, float)
    init_a = _resolve(args, config, "init_a", None, str)
    init_b = _resolve(args, config, "init_b", None, str)
    explicit = init_a is not None or init_b is not None
    if (x0 is None) == (not explicit):
        raise UsageError("provide exactly one of --x0 or --init-a/--init-b")
    if explicit:
        if init_a is None or init_b is None:
            raise UsageError("--init-a and --init-b must be given together")
        a = BitString.from_string(init_a)
        b = BitString.from_string(init_b)
        if a.length != n or b.length != n:
            raise UsageError("initial strings must have length n")
        return a, b
    if not 0.0 <= x0 <= 1.0:
        raise UsageError("--x0 must lie in [0, 1]")
    setup = LocalRng(derive_seed(seed_value, 0x73657475))
    return make_pair_with_agreement(n, round(x0 * n), setup)


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    n = _resolve(args, config, "n", None, int)
    k = _resolve(args, config, "k", None, int)
    l = _resolve(args, config, "l", None, int)
    steps = _resolve(args, config, "steps", None, int)
    if None in (n, k, l, steps):
        raise UsageError("simulate requires --n, --k, --l, and --steps")
    if k > n:
        raise UsageError("k must not exceed n")
    r = _resolve(args, config, "r", None, int)
    mode = _resolve(args, config, "mode", MODE_ORACLE, str)
    seed_value = _resolve_seed(args, config)

    params = ProtocolParams(n=n, k=k, l=l, t_max=steps, seed=SharedSeed(seed_value), r=r, mode=mode)
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc))
    a, b = _session_inputs(args, config, n, seed_value)
    rng_a = LocalRng(derive_seed(seed_value, 0xA0))
    rng_b = LocalRng(derive_seed(seed_value, 0xB0))
    _, _, trace = run_session(params, a, b, rng_a, rng_b)

    with _open_out(args.out) as fh:
        csvio.write_trace(trace, n, fh, oracle=(mode == MODE_ORACLE))
    if args.plot:
        from bitpact import report

        report.plot_trace(trace, n, args.plot)
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = _load_config(args.config)
    n = _resolve(args, config, "n", None, int)
    k = _resolve(args, config, "k", None, int)
    l = _resolve(args, config, "l", None, int)
    x0 = _resolve(args, config, "x0", None, float)
    if None in (n, k, l, x0):
        raise UsageError("compare requires --n, --k, --l, and --x0")
    if k > n:
        raise UsageError("k must not exceed n")
    steps = _resolve(args, config, "steps", 5 * n, int)
    trials = _resolve(args, config, "trials", 11, int)
    dt = _resolve(args, config, "dt", 1e-3, float)
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    seed_value = _resolve_seed(args, config)

    params = ProtocolParams(n=n, k=k, l=l, t_max=steps, seed=SharedSeed(seed_value))
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc))
    x0_count = round(x0 * n)
    result = run_monte_carlo(params, x0_count, trials, seed_value)
    model = DriftModel(k=k, l=l)
    sol = integrate_ode(model, x0_count / n, max(steps / n, dt), dt=dt)
    rows = []
    for i in range(steps + 1):
        t = i / n
        x_ode = sol.at(t)
        x_emp = result.mean[i] / n
        rows.append(
            {"t": t, "x_ode": x_ode, "x_empirical_mean": x_emp, "abs_dev": abs(x_ode - x_emp)}
        )
    max_dev = max(r["abs_dev"] for r in rows)
    with _open_out(args.out) as fh:
        csvio.write_compare(rows, max_dev, fh)
    if args.plot:
        from bitpact import report

        report.plot_compare(rows, args.plot)
    return EXIT_OK


def _cmd_ode(args) -> int:
    config = _load_config(args.config)
    k = _resolve(args, config, "k", None, int)
    l = _resolve(args, config, "l", None, int)
    x0 = _resolve(args, config, "x0", None, float)
    if None in (k, l, x0):
        raise UsageError("ode requires --k, --l, and --x0")
    t_end = _resolve(args, config, "t_end", 10.0, float)
    dt = _resolve(args, config, "dt", 1e-3, float)
    try:
        sol = integrate_ode(DriftModel(k=k, l=l), x0, t_end, dt=dt)
    except ValueError as exc:
        raise UsageError(str(exc))
    with _open_out(args.out) as fh:
        csvio.write_ode(sol, fh)
    if args.plot:
        from bitpact import report

        report.plot_ode(sol, args.plot)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    config = _load_config(args.config)
    k_values = _parse_list(_resolve(args, config, "k_values", "2,3,5", str), int)
    l_values = _parse_list(_resolve(args, config, "l_values", "1,2", str), int)
    x0_values = _parse_list(_resolve(args, config, "x0_values", "0.05,0.1,0.2", str), float)
    targets = _parse_list(_resolve(args, config, "hx_targets", "0.2,0.4,0.6", str), float)
    dt = _resolve(args, config, "dt", 1e-3, float)

    rows = []
    violations = 0
    for k in k_values:
        for l in l_values:
            if l > k:
                continue
            model = DriftModel(k=k, l=l)
            for x0 in x0_values:
                for target in targets:
                    h = target / x0
                    if h < 1.0 or h > 1.0 / x0:
                        continue
                    case = hitting_time_bound(model, x0, h)
                    generic = hitting_time_bound_generic(model, x0, h)
                    measured = ode_hitting_time(model, x0, h, dt=dt)
                    rows.append(
                        {
                            "k": k,
                            "l": l,
                            "x0": x0,
                            "h": h,
                            "bound_case": case,
                            "bound_generic": generic,
                            "ode_hitting_time": measured,
                        }
                    )
                    if not (measured <= generic + 1e-9 and generic <= case + 1e-9):
                        violations += 1
    with _open_out(args.out) as fh:
        csvio.write_bounds(rows, fh)
        if violations:
            fh.write(f"# ORDERING VIOLATIONS: {violations}\n")
    if args.plot:
        from bitpact import report

        report.plot_bounds(rows, args.plot)
    return EXIT_SELFCHECK if violations else EXIT_OK


def _cmd_mpc_demo(args) -> int:
    config = _load_config(args.config)
    k = _resolve(args, config, "k", 4, int)
    if k > 64:
        raise UsageError("k must not exceed 64 for the demo")
    if k < 1:
        raise UsageError("k must be >= 1")
    which = _resolve(args, config, "circuit", "threshold", str)
    r = _resolve(args, config, "r", (k + 1) // 2, int)
    seed_value = _resolve_seed(args, config)
    input_a = _resolve(args, config, "input_a", None, str)
    input_b = _resolve(args, config, "input_b", None, str)

    setup = LocalRng(derive_seed(seed_value, 0xDE))
    a_bits = (
        BitString.from_string(input_a).bits() if input_a else BitString.random(k, setup).bits()
    )
    b_bits = (
        BitString.from_string(input_b).bits() if input_b else BitString.random(k, setup).bits()
    )
    if len(a_bits) != k or len(b_bits) != k:
        raise UsageError("demo inputs must have length k")

    if which == "threshold":
        if not 0 <= r <= k:
            raise UsageError("r must lie in [0, k]")
        circuit = build_threshold_circuit(k, r)
    else:
        circuit = build_count_circuit(k)
    expected = evaluate_plain(circuit, a_bits, b_bits)
    out_a, tr_a, out_b, tr_b, channel = mpc.run_secure_pair(
        circuit,
        a_bits,
        b_bits,
        LocalRng(derive_seed(seed_value, 0xA1)),
        LocalRng(derive_seed(seed_value, 0xB1)),
        LocalRng(derive_seed(seed_value, 0xD1)),
    )
    ok = out_a == expected and out_b == expected

    def fmt(bits):
        return "".join(map(str, bits))

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w")
    try:
        out.write(f"circuit:        {which} (k={k}" + (f", r={r}" if which == "threshold" else "") + ")\n")
        out.write(f"input A:        {fmt(a_bits)}\n")
        out.write(f"input B:        {fmt(b_bits)}\n")
        out.write(f"output A:       {fmt(out_a)}\n")
        out.write(f"output B:       {fmt(out_b)}\n")
        out.write(f"plain oracle:   {fmt(expected)}\n")
        out.write(f"gates total:    {circuit.gate_count}\n")
        out.write(f"AND gates:      {circuit.and_count}\n")
        out.write(f"triples used:   {circuit.and_count}\n")
        out.write(f"messages:       {channel.total_messages}\n")
        out.write(f"rounds:         {tr_a.rounds}\n")
        out.write("verdict:        " + ("MATCH" if ok else "MISMATCH") + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK if ok else EXIT_SELFCHECK


def _cmd_selfcheck(args) -> int:
    seed_value = _resolve_seed(args, _load_config(args.config))
    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        if not ok:
            failures += 1

    # Flip-outcome identity at small sizes.
    ok = True
    for k in range(1, 7):
        for j in range(k + 1):
            for l in range(1, k + 1):
                total = sum(
                    (2 * s - l) * hypergeom_flip_prob(k, j, l, s) for s in range(l + 1)
                )
                ok &= total == signed_flip_identity(k, j, l)
    check("signed flip-outcome identity (k <= 6)", ok)

    # Threshold circuit against the plaintext count, exhaustively.
    ok = True
    for k in range(1, 5):
        r = (k + 1) // 2
        circuit = build_threshold_circuit(k, r)
        for pair in range(1 << (2 * k)):
            a_bits = [(pair >> i) & 1 for i in range(k)]
            b_bits = [(pair >> (k + i)) & 1 for i in range(k)]
            agree = sum(1 for x, y in zip(a_bits, b_bits) if x == y)
            ok &= evaluate_plain(circuit, a_bits, b_bits) == [1 if agree >= r else 0]
    check("threshold circuit exhaustive (k <= 4)", ok)

    # Secure evaluation equals the plaintext oracle on random inputs.
    ok = True
    rng = LocalRng(derive_seed(seed_value, 0x5C))
    circuit = build_threshold_circuit(8, 4)
    for _ in range(20):
        a_bits = [rng.getrandbits(1) for _ in range(8)]
        b_bits = [rng.getrandbits(1) for _ in range(8)]
        out_a, _, out_b, _, _ = mpc.run_secure_pair(
            circuit,
            a_bits,
            b_bits,
            LocalRng(rng.getrandbits(63)),
            LocalRng(rng.getrandbits(63)),
            LocalRng(rng.getrandbits(63)),
        )
        expected = evaluate_plain(circuit, a_bits, b_bits)
        ok &= out_a == expected and out_b == expected
    check("secure evaluation vs oracle (k=8, 20 random pairs)", ok)

    # Drift polynomial lower bound and hitting-time ordering.
    ok = True
    for k in (2, 3, 5):
        model = DriftModel(k=k, l=1)
        for x in np.linspace(0.01, 0.99, 25):
            ok &= lower_bound_p(model, float(x)) <= p_of_x(model, float(x)) + 1e-12
    model = DriftModel(k=2, l=1)
    measured = ode_hitting_time(model, 0.1, 2.0)
    ok &= measured <= hitting_time_bound_generic(model, 0.1, 2.0) + 1e-9
    ok &= hitting_time_bound_generic(model, 0.1, 2.0) <= hitting_time_bound(model, 0.1, 2.0) + 1e-9
    check("drift bounds and hitting-time ordering", ok)

    # RK4 against the closed-form k=2, l=1 trajectory.
    sol = integrate_ode(DriftModel(k=2, l=1), 0.3, 5.0, dt=1e-3)
    exact = 1 - 0.7 / (1 + 0.7 * 5.0)
    check("RK4 vs closed form (k=2, l=1)", abs(sol.final - exact) < 1e-6)

    # Tiny end-to-end session determinism.
    params = ProtocolParams(n=64, k=5, l=2, t_max=50, seed=SharedSeed(seed_value))
    setup = LocalRng(derive_seed(seed_value, 0x51))
    a, b = make_pair_with_agreement(64, 20, setup)
    traces = []
    for _ in range(2):
        _, _, trace = run_session(
            params, a, b, LocalRng(derive_seed(seed_value, 1)), LocalRng(derive_seed(seed_value, 2))
        )
        traces.append(trace)
    check("session determinism", traces[0] == traces[1])

    print(f"{'OK' if failures == 0 else 'FAILED'}: {6 - failures}/6 checks passed")
    return EXIT_OK if failures == 0 else EXIT_SELFCHECK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "ode": _cmd_ode,
    "bounds": _cmd_bounds,
    "mpc-demo": _cmd_mpc_demo,
    "selfcheck": _cmd_selfcheck,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
