"""The two-party agreement session engine.

Each of the T lockstep steps: both parties derive the same random
k-position sample from the shared seed, test whether they disagree on
at least r of them (r defaults to ceil(k/2)), and if so the party whose
turn it is flips a private random l-subset of the sample.  The turn at
step i belongs to the party c with (i + c) odd; steps count from 1.

Modes:
  oracle  - the disagreement count is computed directly (the harness
            sees both strings); fast, used for experiments.
  secure  - the threshold test runs through the MPC module on the
            restricted substrings, so each party learns only the
            one-bit verdict.

Both modes consume the parties' flip randomness identically, so traces
match field-for-field across modes (excluding oracle-only fields and
message counters).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from bitpact import mpc
from bitpact.bitstring import BitString, PositionSet, make_pair_with_agreement
from bitpact.circuit import Circuit, build_threshold_circuit
from bitpact.randomness import LocalRng, SharedSeed, derive_seed, joint_rand, rand_subset

MODE_ORACLE = "oracle"
MODE_SECURE = "secure"

# Domain-separation tags for auxiliary seed derivation.
_TAG_DEALER = 0x6465616C
_TAG_MPC_A = 0x6D706341
_TAG_MPC_B = 0x6D706342
_TAG_TRIAL_SHARED = 1
_TAG_TRIAL_RNG_A = 2
_TAG_TRIAL_RNG_B = 3
_TAG_TRIAL_SETUP = 4


class SessionError(RuntimeError):
    """Channel or parameter failure mid-session; carries the last
    completed step."""

    def __init__(self, message: str, last_step: int):
        super().__init__(message)
        self.last_step = last_step


@dataclass(frozen=True)
class ProtocolParams:
    """All shared protocol knobs."""

    n: int
    k: int
    l: int
    t_max: int
    seed: SharedSeed
    r: int | None = None  # disagreement threshold; None -> ceil(k/2)
    mode: str = MODE_ORACLE

    @property
    def threshold(self) -> int:
        return (self.k + 1) // 2 if self.r is None else self.r

    def validate(self) -> None:
        if not 1 <= self.l <= self.k <= self.n:
            raise ValueError(f"need 1 <= l <= k <= n, got l={self.l} k={self.k} n={self.n}")
        if self.t_max < 0:
            raise ValueError("t_max must be >= 0")
        if not 0 <= self.threshold <= self.k:
            raise ValueError(f"r={self.threshold} out of [0, {self.k}]")
        if self.mode not in (MODE_ORACLE, MODE_SECURE):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class TraceRecord:
    """Per-step observables.  j and s (sampled/flipped disagreement
    counts) are only visible in oracle mode."""

    step: int
    x: int  # agreement count after the step
    turn: int  # party id whose turn it was
    flipped: bool
    msgs: int
    j: int | None = None
    s: int | None = None


def _disagreements_at(a_val: int, b_val: int, positions: PositionSet) -> int:
    diff = a_val ^ b_val
    return sum((diff >> p) & 1 for p in positions.indices)


def _secure_disagreement_test(
    circuit: Circuit,
    a_val: int,
    b_val: int,
    positions: PositionSet,
    mpc_rng_a: LocalRng,
    mpc_rng_b: LocalRng,
    dealer_rng: LocalRng,
) -> tuple[bool, int]:
    """Both parties' secure threshold test on the sampled substrings.

    The disagreement predicate a_i != b_i equals the agreement of a_i
    with NOT b_i, so party B feeds its complemented sample into the
    agreement-threshold circuit.
    """
    a_bits = [(a_val >> p) & 1 for p in positions.indices]
    b_bits = [1 ^ ((b_val >> p) & 1) for p in positions.indices]
    out_a, tr_a, out_b, tr_b, channel = mpc.run_secure_pair(
        circuit, a_bits, b_bits, mpc_rng_a, mpc_rng_b, dealer_rng
    )
    if out_a != out_b:
        raise SessionError("secure evaluation outputs diverged", 0)
    return out_a[0] == 1, channel.total_messages


def run_session(
    params: ProtocolParams,
    a: BitString,
    b: BitString,
    rng_a: LocalRng,
    rng_b: LocalRng,
) -> tuple[BitString, BitString, list[TraceRecord]]:
    """Execute exactly t_max steps and return the final strings plus the
    full trace.  Final strings are exposed for verification harnesses
    only; a deployment would never reveal them."""
    params.validate()
    if a.length != params.n or b.length != params.n:
        raise ValueError("string lengths must equal params.n")

    oracle = params.mode == MODE_ORACLE
    r = params.threshold
    if not oracle:
        circuit = build_threshold_circuit(params.k, r)
        dealer_rng = LocalRng(derive_seed(params.seed.value, _TAG_DEALER))
        mpc_rng_a = LocalRng(derive_seed(params.seed.value, _TAG_MPC_A))
        mpc_rng_b = LocalRng(derive_seed(params.seed.value, _TAG_MPC_B))

    a_val, b_val = a.value, b.value
    party_rngs = (rng_a, rng_b)
    trace: list[TraceRecord] = []
    x = params.n - (a_val ^ b_val).bit_count()

    for i in range(1, params.t_max + 1):
        s_set = joint_rand(params.seed, i, params.k, params.n)
        turn = 1 - (i % 2)  # the c with (i + c) odd
        j = _disagreements_at(a_val, b_val, s_set)
        if oracle:
            should_flip = j >= r
            msgs = 2  # the two barrier tokens
        else:
            should_flip, mpc_msgs = _secure_disagreement_test(
                circuit, a_val, b_val, s_set, mpc_rng_a, mpc_rng_b, dealer_rng
            )
            msgs = mpc_msgs + 2

        flipped = False
        s_cnt: int | None = None
        if should_flip:
            flip_set = rand_subset(party_rngs[turn], params.l, s_set)
            s_cnt = _disagreements_at(a_val, b_val, flip_set)
            if turn == 0:
                a_val ^= flip_set.mask
            else:
                b_val ^= flip_set.mask
            x += s_cnt - (params.l - s_cnt)
            flipped = True

        trace.append(
            TraceRecord(
                step=i,
                x=x,
                turn=turn,
                flipped=flipped,
                msgs=msgs,
                j=j if oracle else None,
                s=s_cnt if (oracle and flipped) else None,
            )
        )

    return BitString(a_val, params.n), BitString(b_val, params.n), trace


@dataclass
class MonteCarloResult:
    """Aggregate trajectory statistics over independent sessions.
    Index 0 is the initial state X(0); index i is after step i."""

    mean: np.ndarray
    var: np.ndarray
    trials: int

    @property
    def steps(self) -> np.ndarray:
        return np.arange(len(self.mean))


def run_monte_carlo(
    params: ProtocolParams,
    x0_count: int,
    trials: int,
    base_seed: int,
) -> MonteCarloResult:
    """`trials` independent sessions with derived seeds, starting from
    fresh random pairs agreeing at exactly x0_count positions."""
    params.validate()
    if not 0 <= x0_count <= params.n:
        raise ValueError(f"x0_count {x0_count} out of [0, {params.n}]")
    if trials < 1:
        raise ValueError("trials must be >= 1")

    total = np.zeros(params.t_max + 1)
    total_sq = np.zeros(params.t_max + 1)
    for t in range(trials):
        trial_seed = derive_seed(base_seed, t)
        setup = LocalRng(derive_seed(trial_seed, _TAG_TRIAL_SETUP))
        a, b = make_pair_with_agreement(params.n, x0_count, setup)
        trial_params = replace(
            params, seed=SharedSeed(derive_seed(trial_seed, _TAG_TRIAL_SHARED))
        )
        try:
            _, _, trace = run_session(
                trial_params,
                a,
                b,
                LocalRng(derive_seed(trial_seed, _TAG_TRIAL_RNG_A)),
                LocalRng(derive_seed(trial_seed, _TAG_TRIAL_RNG_B)),
            )
        except SessionError as exc:
            raise SessionError(f"trial {t}: {exc}", exc.last_step) from exc
        xs = np.empty(params.t_max + 1)
        xs[0] = x0_count
        for rec in trace:
            xs[rec.step] = rec.x
        total += xs
        total_sq += xs * xs
    mean = total / trials
    var = np.maximum(total_sq / trials - mean * mean, 0.0)
    return MonteCarloResult(mean=mean, var=var, trials=trials)
