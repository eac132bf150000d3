from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Final, List, Literal, Optional

from jinja2 import DebugUndefined, Environment, FileSystemLoader  # type: ignore
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from blindqc import __version__
from blindqc.exceptions import BlindQCError, ConfigurationError, TransportError, ZeroAcceptanceError
from blindqc.models.circuit import circuit_from_json
from blindqc.models.reports import CertifyReportModel
from blindqc.protocol.client import DelegationClient, connect
from blindqc.protocol.server import AuditLog, QuantumServer
from blindqc.protocol.transport import SocketListener, parse_address
from blindqc.qfactory.certify import ALL_ALPHAS, certify, certify_grid
from blindqc.qfactory.rsp import CALIBRATED_THETA_RULE, RspInstance
from blindqc.qfactory.trapdoor import TrapdoorKey, keygen, save_key
from blindqc.qsim.circuit import Circuit
from blindqc.utils.modes import BranchMode, FilterMode, InputState
from blindqc.workflows.demos import DEMOS, get_demo, run_demo

logger = logging.getLogger(__name__)

TEMPLATES_DIR: Final[Path] = Path(__file__).parent / "templates"

EXIT_OK: Final[int] = 0
EXIT_FAILURE: Final[int] = 1
EXIT_USAGE: Final[int] = 2

FILTER_CHOICES: Final[dict] = {"exact": FilterMode.EXACT_SUBSTRING, "theta": FilterMode.THETA_MATCH}
BRANCH_CHOICES: Final[dict] = {"zero": BranchMode.ZERO_BRANCH, "decode": BranchMode.FRAME_DECODE}


class RunConfig(BaseModel):
    """Validated command line of one invocation."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Literal["demo", "certify", "keygen", "serve", "submit"]
    demo: Optional[str] = None
    shots: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    filter_mode: FilterMode = FilterMode.EXACT_SUBSTRING
    branch_mode: BranchMode = BranchMode.FRAME_DECODE
    input_state: Optional[InputState] = None
    listen: Optional[str] = None
    connect: Optional[str] = None
    out: Optional[Path] = None
    swap_reuse: bool = False
    exact: bool = False
    source: Optional[str] = None
    circuit: Optional[Path] = None
    audit_log: Optional[Path] = None
    test_key: bool = False

    @model_validator(mode="after")
    def check_transport(self):
        if self.listen and self.connect:
            raise ValueError("choose either --listen or --connect")
        if self.command == "serve" and not self.listen:
            raise ValueError("serve needs --listen HOST:PORT")
        if self.command == "submit":
            if not self.connect:
                raise ValueError("submit needs --connect HOST:PORT")
            if bool(self.source) == bool(self.circuit):
                raise ValueError("submit needs exactly one of --source or --circuit")
        if self.command != "serve" and self.listen:
            raise ValueError("--listen only applies to serve")
        return self

    @property
    def transport(self) -> str:
        if self.listen:
            return "listen"
        return "connect" if self.connect else "inproc"


def render(template_name: str, **context) -> str:
    env = Environment(
        loader=FileSystemLoader(TEMPLATES_DIR),
        trim_blocks=True,
        lstrip_blocks=True,
        undefined=DebugUndefined,
    )
    return env.get_template(template_name).render(**context)


def cmd_demo(config: RunConfig) -> int:
    transport = connect(parse_address(config.connect)) if config.connect else None
    try:
        report = run_demo(
            config.demo,  # type: ignore[arg-type]
            shots=config.shots,
            seed=config.seed,
            filter_mode=config.filter_mode,
            branch_mode=config.branch_mode,
            input_state=config.input_state,
            swap_reuse=config.swap_reuse,
            exact=config.exact,
            transport=transport,
        )
    finally:
        if transport:
            transport.close()
    if config.out:
        report.write(config.out)
    print(render("demo.txt.j2", report=report))
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_certify(config: RunConfig) -> int:
    reports = list(certify_grid(ALL_ALPHAS))
    if config.test_key:
        for e in (0, 1):
            reports.append(certify(RspInstance(TrapdoorKey(0, e, test_mode=True), (0, 0)), raises=False))
    model = CertifyReportModel.from_reports(reports, CALIBRATED_THETA_RULE)
    if config.out:
        model.write(config.out)
    print(render("certify.txt.j2", report=model))
    return EXIT_OK if model.passed else EXIT_FAILURE


def cmd_keygen(config: RunConfig) -> int:
    key, public = keygen(config.seed)
    path = config.out or Path("trapdoor.json")
    save_key(key, path)
    print(render("keygen.txt.j2", public=public, path=path))
    return EXIT_OK


def cmd_serve(config: RunConfig) -> int:
    listener = SocketListener(parse_address(config.listen))  # type: ignore[arg-type]
    server = QuantumServer(AuditLog(config.audit_log))
    print(f"Serving on {listener.host}:{listener.port}")
    try:
        server.serve_forever(listener)
    except KeyboardInterrupt:
        logger.info("Interrupted")
    finally:
        server.shutdown()
    return EXIT_OK


def _submit_source(config: RunConfig) -> Circuit:
    if config.circuit:
        return circuit_from_json(config.circuit.read_text(encoding="utf-8"))
    return get_demo(config.source).source()  # type: ignore[arg-type]


def _submit_input(config: RunConfig) -> InputState:
    if config.input_state is not None:
        return config.input_state
    return get_demo(config.source).input_state if config.source else InputState.ZERO


def cmd_submit(config: RunConfig) -> int:
    source = _submit_source(config)
    transport = connect(parse_address(config.connect))  # type: ignore[arg-type]
    try:
        client = DelegationClient(
            transport,
            seed=config.seed,
            filter_mode=config.filter_mode,
            branch_mode=config.branch_mode,
            input_state=_submit_input(config),
            swap_reuse=config.swap_reuse,
        )
        report = client.run(source, config.shots).to_model()
    finally:
        transport.close()
    if config.out:
        report.write(config.out)
    print(render("filter.txt.j2", report=report))
    return EXIT_OK


COMMANDS: Final[dict] = {
    "demo": cmd_demo,
    "certify": cmd_certify,
    "keygen": cmd_keygen,
    "serve": cmd_serve,
    "submit": cmd_submit,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--shots", type=int, help="shots sent to the server (default grows as 1200*16^nodes)")
    common.add_argument("--seed", type=int, help="seed of every random draw")
    common.add_argument("--filter", choices=sorted(FILTER_CHOICES), default="exact", help="shot filtering mode")
    common.add_argument("--branch", choices=sorted(BRANCH_CHOICES), default="decode", help="byproduct handling")
    common.add_argument("--input", choices=[state.value for state in InputState], help="input state of every wire")
    common.add_argument("--connect", metavar="HOST:PORT", help="use a remote server")
    common.add_argument("--out", type=Path, metavar="FILE", help="write the JSON report here")
    common.add_argument("--swap-reuse", action="store_true", help="recycle one RSP register with SWAP gates")

    parser = argparse.ArgumentParser(prog="blindqc", description="Blind delegated quantum computation")
    parser.add_argument("--version", action="version", version=f"blindqc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", parents=[common], help="run a demo blind and directly")
    demo.add_argument("demo", choices=sorted(DEMOS))
    demo.add_argument("--exact", action="store_true", help="exact branch probabilities instead of sampling")

    certify_cmd = sub.add_parser("certify", parents=[common], help="certify remote state preparation")
    certify_cmd.add_argument("--test-key", action="store_true", help="also certify the degenerate d0=0 keys")

    sub.add_parser("keygen", parents=[common], help="draw a trapdoor key into a local secrets file")

    serve = sub.add_parser("serve", parents=[common], help="run a server")
    serve.add_argument("--listen", metavar="HOST:PORT", required=True)
    serve.add_argument("--audit-log", type=Path, metavar="FILE", help="mirror the audit log to a file")

    submit = sub.add_parser("submit", parents=[common], help="delegate a circuit to a server")
    submit.add_argument("--source", choices=sorted(DEMOS))
    submit.add_argument("--circuit", type=Path, metavar="FILE", help="circuit JSON")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        demo=getattr(args, "demo", None),
        shots=args.shots,
        seed=args.seed,
        filter_mode=FILTER_CHOICES[args.filter],
        branch_mode=BRANCH_CHOICES[args.branch],
        input_state=InputState(args.input) if args.input else None,
        listen=getattr(args, "listen", None),
        connect=args.connect,
        out=args.out,
        swap_reuse=args.swap_reuse,
        exact=getattr(args, "exact", False),
        source=getattr(args, "source", None),
        circuit=getattr(args, "circuit", None),
        audit_log=getattr(args, "audit_log", None),
        test_key=getattr(args, "test_key", False),
    )


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except ValidationError as error:
        print(f"blindqc: {error.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[config.command](config)
    except ZeroAcceptanceError as error:
        print(f"blindqc: {error.message}", file=sys.stderr)
        return EXIT_FAILURE
    except (TransportError, ConfigurationError) as error:
        print(f"blindqc: {error}", file=sys.stderr)
        return EXIT_USAGE
    except BlindQCError as error:
        logger.error(f"{config.command} failed: {error}")
        print(f"blindqc: {error}", file=sys.stderr)
        return EXIT_USAGE
