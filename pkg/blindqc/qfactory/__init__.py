from blindqc.qfactory.certify import (
    ALL_ALPHAS,
    BranchCertificate,
    CertificationReport,
    calibrate_theta_rule,
    certify,
    certify_grid,
    theta_coverage,
)
from blindqc.qfactory.oracle import build_oracle, emit_oracle
from blindqc.qfactory.rsp import (
    CALIBRATED_THETA_RULE,
    DEFAULT_LAYOUT,
    RspInstance,
    RspLayout,
    SignSource,
    SqueezeSite,
    ThetaRule,
    build_rsp_circuit,
    compute_theta,
    emit_rsp,
    split_outcome,
    theta_for_outcome,
    theta_table,
)
from blindqc.qfactory.trapdoor import (
    VALID_KEYS,
    PublicMatrices,
    TrapdoorKey,
    eval_f,
    invert,
    keygen,
    load_key,
    preimages,
    save_key,
)

__all__ = [
    "ALL_ALPHAS",
    "BranchCertificate",
    "CertificationReport",
    "calibrate_theta_rule",
    "certify",
    "certify_grid",
    "theta_coverage",
    "build_oracle",
    "emit_oracle",
    "CALIBRATED_THETA_RULE",
    "DEFAULT_LAYOUT",
    "RspInstance",
    "RspLayout",
    "SignSource",
    "SqueezeSite",
    "ThetaRule",
    "build_rsp_circuit",
    "compute_theta",
    "emit_rsp",
    "split_outcome",
    "theta_for_outcome",
    "theta_table",
    "VALID_KEYS",
    "PublicMatrices",
    "TrapdoorKey",
    "eval_f",
    "invert",
    "keygen",
    "load_key",
    "preimages",
    "save_key",
]
