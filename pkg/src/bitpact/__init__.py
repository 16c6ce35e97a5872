"""bitpact: a two-party bit-agreement protocol with secure threshold tests.

Two parties holding dissimilar bit strings repeatedly sample a shared
random subset of positions, securely test whether they disagree on at
least half of them, and (in alternation) flip a random sub-subset to
drive the strings toward agreement.  The package bundles the protocol
engine, the Boolean-circuit MPC used for the threshold test, and the
exact/asymptotic analysis of the agreement dynamics.
"""

from bitpact.bitstring import (
    BitString,
    PositionSet,
    agreement_count,
    flip_positions,
    make_pair_with_agreement,
    restrict,
)
from bitpact.randomness import LocalRng, SharedSeed, joint_rand, rand_subset, random_bits
from bitpact.analysis import (
    DriftModel,
    OdeSolution,
    expected_drift_exact,
    hypergeom_flip_prob,
    integrate_ode,
    lower_bound_p,
    p_of_x,
    signed_flip_identity,
)
from bitpact.protocol import ProtocolParams, TraceRecord, run_monte_carlo, run_session

__all__ = [
    "BitString",
    "PositionSet",
    "agreement_count",
    "restrict",
    "flip_positions",
    "make_pair_with_agreement",
    "SharedSeed",
    "LocalRng",
    "joint_rand",
    "rand_subset",
    "random_bits",
    "DriftModel",
    "OdeSolution",
    "hypergeom_flip_prob",
    "signed_flip_identity",
    "expected_drift_exact",
    "p_of_x",
    "integrate_ode",
    "lower_bound_p",
    "ProtocolParams",
    "TraceRecord",
    "run_session",
    "run_monte_carlo",
]

__version__ = "0.1.0"
