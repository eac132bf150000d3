from blindqc.ubqc.blinding import BlindedPattern, BlindingSecrets, RFlags, blind, blinded_input_prep, decode_output
from blindqc.ubqc.verification import (
    BlindingEquivalenceReport,
    RCaseOutcome,
    RCaseReport,
    chain_branch_coefficients,
    two_node_chain,
    verify_blinding_equivalence,
    verify_r_cases,
)

__all__ = [
    "BlindedPattern",
    "BlindingEquivalenceReport",
    "BlindingSecrets",
    "RCaseOutcome",
    "RCaseReport",
    "RFlags",
    "blind",
    "blinded_input_prep",
    "chain_branch_coefficients",
    "decode_output",
    "two_node_chain",
    "verify_blinding_equivalence",
    "verify_r_cases",
]
