from __future__ import annotations

import logging
from typing import Callable, Dict, Final, Optional

from attr import define  # type: ignore

from blindqc.exceptions import ConfigurationError
from blindqc.models.reports import DemoReportModel
from blindqc.protocol.client import DelegationClient, client_run
from blindqc.protocol.transport import Transport
from blindqc.qsim.circuit import Circuit, CircuitBuilder
from blindqc.qsim.simulator import exact_distribution
from blindqc.utils.modes import BranchMode, FilterMode, InputState
from blindqc.utils.stats import total_variation_distance

logger = logging.getLogger(__name__)

SAMPLED_TVD_TOLERANCE: Final[float] = 0.05
EXACT_TVD_TOLERANCE: Final[float] = 1e-9


def bell_circuit() -> Circuit:
    return CircuitBuilder(2).h(0).cx(0, 1).build()


def ghz_circuit() -> Circuit:
    return CircuitBuilder(3).h(0).cx(0, 1).cx(1, 2).build()


def chain_circuit() -> Circuit:
    """H * Rz(pi/4): the rotation acts first."""
    return CircuitBuilder(1).rz(0, 1).h(0).build()


@define(frozen=True)
class Demo:
    name: str
    source: Callable[[], Circuit]
    input_state: InputState


DEMOS: Final[Dict[str, Demo]] = {
    "bell": Demo("bell", bell_circuit, InputState.ZERO),
    "ghz": Demo("ghz", ghz_circuit, InputState.ZERO),
    "chain": Demo("chain", chain_circuit, InputState.PLUS),
}


def direct_distribution(source: Circuit, input_state: InputState = InputState.ZERO) -> Dict[str, float]:
    """Circuit-model reference: exact output distribution of `source` on |0...0> or |+...+>."""
    builder = CircuitBuilder(source.num_qubits)
    if input_state == InputState.PLUS:
        for qubit in range(source.num_qubits):
            builder.h(qubit)
    builder.compose(source)
    return exact_distribution(builder.build().with_measurements())


def get_demo(name: str) -> Demo:
    try:
        return DEMOS[name]
    except KeyError:
        raise ConfigurationError(f"Unknown demo {name!r}, choose one of {sorted(DEMOS)}")


def run_demo(
    name: str,
    shots: Optional[int] = None,
    seed: Optional[int] = None,
    filter_mode: FilterMode = FilterMode.EXACT_SUBSTRING,
    branch_mode: BranchMode = BranchMode.ZERO_BRANCH,
    input_state: Optional[InputState] = None,
    swap_reuse: bool = False,
    exact: bool = False,
    transport: Optional[Transport] = None,
) -> DemoReportModel:
    """Runs a demo blind and directly, side by side.

    With `exact` the blind distribution comes from the composed circuit's exact branch
    probabilities (TVD tolerance 1e-9), otherwise from sampled shots (tolerance 0.05).

    Example usage:
        >>> report = run_demo("bell", seed=3, exact=True)
        >>> sorted(report.observed)
        ['00', '11']
    """
    demo = get_demo(name)
    input_state = InputState(input_state) if input_state is not None else demo.input_state
    source = demo.source()
    reference = direct_distribution(source, input_state)
    options = dict(
        filter_mode=FilterMode(filter_mode),
        branch_mode=BranchMode(branch_mode),
        input_state=input_state,
        swap_reuse=swap_reuse,
    )
    accepted: Optional[int] = None
    if exact:
        exact_report = DelegationClient(seed=seed, **options).exact_report(source)
        observed, rate, tolerance = exact_report.distribution, exact_report.acceptance, EXACT_TVD_TOLERANCE
    else:
        report = client_run(source, shots=shots, seed=seed, transport=transport, **options)
        observed, rate, tolerance = report.distribution, report.acceptance_rate, SAMPLED_TVD_TOLERANCE
        accepted, shots = report.accepted_shots, report.total_shots
    tvd = total_variation_distance(reference, observed)
    logger.info(f"Demo {name}: TVD {tvd:.6f} against the direct simulation, acceptance {rate:.6f}")
    return DemoReportModel(
        name=name,
        mode="exact" if exact else "sampled",
        input=input_state.value,
        filter=options["filter_mode"].value,
        branch=options["branch_mode"].value,
        shots=None if exact else shots,
        seed=seed,
        reference={bits: round(p, 12) for bits, p in reference.items()},
        observed={bits: round(p, 12) for bits, p in observed.items()},
        tvd=round(tvd, 12),
        tolerance=tolerance,
        acceptance_rate=round(rate, 12),
        accepted=accepted,
        passed=tvd <= tolerance,
    )
