from __future__ import annotations

import logging
from collections import Counter
from typing import Callable, Dict, Final, FrozenSet, List, Optional, Set, Tuple

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import NoMeasurementsError, SimulationLimitError
from blindqc.qsim.circuit import Circuit, Gate
from blindqc.qsim.register import MAX_LIVE_QUBITS, ZERO_PROBABILITY, BatchedRegister
from blindqc.qsim.statevector import Statevector
from blindqc.utils.bits import outcome_string

logger = logging.getLogger(__name__)

CHUNK_SIZE: Final[int] = 4096
MAX_SHOTS: Final[int] = 1 << 24
MAX_BRANCHES: Final[int] = 1 << 20

Counts = Counter
Postselect = Callable[[np.ndarray, FrozenSet[int]], np.ndarray]


@define(frozen=True)
class Branch:
    """One joint outcome of every measurement in a circuit.

    `bits` is the clbit string (clbit 0 rightmost), `residual` the normalized state of the
    qubits listed in `residual_qubits` (None for a null branch).
    """

    bits: str
    probability: float
    residual: Optional[Statevector] = field(eq=False)
    residual_qubits: Tuple[int, ...]
    is_null: bool = False


def _outcome_strings(clbits: np.ndarray) -> List[Tuple[str, int]]:
    if clbits.shape[0] == 0:
        return []
    rows, counts = np.unique(clbits, axis=0, return_counts=True)
    return [(outcome_string(row), int(count)) for row, count in zip(rows, counts)]


def _run_chunk(circuit: Circuit, shots: int, rng: np.random.Generator, max_live: int) -> Counts:
    register = BatchedRegister(shots, circuit.num_qubits, circuit.num_clbits, max_live=max_live)
    for instruction in circuit.instructions:
        register.step(instruction, rng=rng)
    return Counter(dict(_outcome_strings(register.clbits)))


def run_shots(
    circuit: Circuit,
    shots: int,
    seed: Optional[int] = None,
    chunk_size: int = CHUNK_SIZE,
    max_live: int = MAX_LIVE_QUBITS,
) -> Counts:
    """Samples `shots` executions of `circuit`.

    Shots are processed in chunks; chunk c draws from ``numpy.random.default_rng([seed, c])``
    so results only depend on the seed, shot count and chunk size.

    Example usage:
        >>> bell = CircuitBuilder(2, 2).h(0).cx(0, 1).measure(0, 0).measure(1, 1).build()
        >>> sorted(run_shots(bell, 1000, seed=7))
        ['00', '11']

    Args:
        circuit: circuit to sample
        shots: number of executions
        seed: entropy of the random stream, fresh entropy when None
        chunk_size: shots simulated together in one batched register
        max_live: guard on simultaneously allocated qubits

    Raises:
        NoMeasurementsError: circuit never writes a clbit
        SimulationLimitError: shots or live width above the guards

    Returns:
        Counter mapping outcome strings to occurrences
    """
    if circuit.num_measurements == 0:
        raise NoMeasurementsError("Circuit has no measurement, nothing to sample")
    if shots < 1 or shots > MAX_SHOTS:
        raise SimulationLimitError("Shot count", shots, MAX_SHOTS)
    entropy = seed if seed is not None else int(np.random.SeedSequence().entropy)  # type: ignore[arg-type]
    counts: Counts = Counter()
    for chunk, start in enumerate(range(0, shots, chunk_size)):
        size = min(chunk_size, shots - start)
        counts.update(_run_chunk(circuit, size, np.random.default_rng([entropy, chunk]), max_live))
    logger.debug(f"Sampled {shots} shots of {len(circuit)} instructions into {len(counts)} outcomes")
    return counts


def enumerate_branches(
    circuit: Circuit,
    include_null: bool = False,
    max_branches: int = MAX_BRANCHES,
    max_live: int = MAX_LIVE_QUBITS,
    postselect: Optional[Postselect] = None,
) -> List[Branch]:
    """Exact probability and post-measurement state of every measurement branch.

    Branches of probability zero are pruned unless `include_null` is set, in which case they
    are returned with `is_null=True` and no residual. Residual states cover every qubit
    whose last operation is not a measurement, in ascending order.

    `postselect` is called after every measurement with the clbit rows and the set of clbits
    written so far; rows it maps to False are dropped before the next measurement splits
    them. Probabilities stay absolute.

    Example usage:
        >>> keep_zero = lambda clbits, written: clbits[:, 0] == 0
        >>> [branch.bits for branch in enumerate_branches(bell, postselect=keep_zero)]
        ['00']

    Raises:
        SimulationLimitError: more than `max_branches` rows alive at once, or live width above the guard
    """
    register = BatchedRegister(1, circuit.num_qubits, circuit.num_clbits, max_live=max_live)
    written: Set[int] = set()
    for instruction in circuit.instructions:
        register.step(instruction, include_null=include_null)
        if instruction.gate != Gate.MEASURE:
            continue
        if register.batch > max_branches:
            raise SimulationLimitError("Branch count", register.batch, max_branches)
        written.add(instruction.clbit)  # type: ignore[arg-type]
        if postselect is not None:
            register.keep(np.asarray(postselect(register.clbits, frozenset(written)), dtype=bool))
    qubits = register.residual_qubits()
    vectors = register.residual(qubits)
    branches = []
    for row in range(register.batch):
        probability = float(register.weights[row])
        bits = outcome_string(register.clbits[row])
        if include_null and probability <= ZERO_PROBABILITY:
            branches.append(Branch(bits, 0.0, None, tuple(qubits), is_null=True))
            continue
        residual = Statevector(len(qubits), vectors[row])
        branches.append(Branch(bits, probability, residual.normalized(), tuple(qubits)))
    logger.debug(f"Enumerated {len(branches)} branches over residual qubits {qubits}")
    return branches


def exact_distribution(circuit: Circuit, postselect: Optional[Postselect] = None) -> Dict[str, float]:
    """Probability of every clbit string, summed over branches writing the same string.

    With `postselect` only the surviving strings are returned and their total is the
    acceptance probability.
    """
    distribution: Dict[str, float] = {}
    for branch in enumerate_branches(circuit, postselect=postselect):
        distribution[branch.bits] = distribution.get(branch.bits, 0.0) + branch.probability
    return dict(sorted(distribution.items()))


def final_state(circuit: Circuit) -> Statevector:
    """Statevector of a measurement-free circuit applied to |0...0>."""
    if any(inst.gate == Gate.MEASURE for inst in circuit.instructions):
        raise ValueError("final_state needs a measurement-free circuit")
    return Statevector.zero(circuit.num_qubits).evolve(circuit)
