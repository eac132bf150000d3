# type: ignore
import io
import json
import tempfile
import unittest
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

from parameterized import parameterized  # type: ignore
from pydantic import ValidationError

from blindqc.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, RunConfig, main, parse_config
from blindqc.exceptions import ZeroAcceptanceError
from blindqc.qfactory.trapdoor import load_key
from blindqc.utils.modes import BranchMode, FilterMode, InputState


class TestParseConfig(TestCase):
    def test_demo_defaults(self):
        # Arrange, Act
        config = parse_config(["demo", "bell"])

        # Assert
        self.assertEqual(config.command, "demo")
        self.assertEqual(config.demo, "bell")
        self.assertEqual(config.filter_mode, FilterMode.EXACT_SUBSTRING)
        self.assertEqual(config.branch_mode, BranchMode.FRAME_DECODE)
        self.assertIsNone(config.input_state)
        self.assertEqual(config.transport, "inproc")

    def test_demo_options(self):
        # Arrange, Act
        config = parse_config(
            ["demo", "chain", "--filter", "theta", "--branch", "zero", "--input", "zero", "--swap-reuse", "--exact"]
        )

        # Assert
        self.assertEqual(config.filter_mode, FilterMode.THETA_MATCH)
        self.assertEqual(config.branch_mode, BranchMode.ZERO_BRANCH)
        self.assertEqual(config.input_state, InputState.ZERO)
        self.assertTrue(config.swap_reuse)
        self.assertTrue(config.exact)

    def test_serve_config(self):
        # Arrange, Act
        config = parse_config(["serve", "--listen", "127.0.0.1:7070", "--audit-log", "audit.jsonl"])

        # Assert
        self.assertEqual(config.transport, "listen")
        self.assertEqual(config.audit_log, Path("audit.jsonl"))

    @parameterized.expand(
        [
            (["submit", "--source", "bell"],),
            (["submit", "--connect", "127.0.0.1:7070"],),
            (["submit", "--connect", "127.0.0.1:7070", "--source", "bell", "--circuit", "c.json"],),
            (["serve", "--listen", "127.0.0.1:7070", "--connect", "127.0.0.1:7071"],),
            (["demo", "bell", "--shots", "0"],),
        ]
    )
    def test_invalid_combinations(self, argv):
        # Arrange, Act, Assert
        with self.assertRaises(ValidationError):
            parse_config(argv)

    def test_listen_only_for_serve(self):
        # Arrange, Act, Assert
        with self.assertRaises(ValidationError):
            RunConfig(command="demo", demo="bell", listen="127.0.0.1:7070")

    @parameterized.expand([(["demo", "teleport"],), (["demo", "bell", "--filter", "fuzzy"],), (["serve"],)])
    def test_argparse_rejects(self, argv):
        # Arrange, Act, Assert
        with patch("sys.stderr", new_callable=io.StringIO):
            with self.assertRaises(SystemExit):
                parse_config(argv)


@patch("sys.stdout", new_callable=io.StringIO)
class TestMain(TestCase):
    def test_exact_demo_writes_report(self, mock_stdout):
        # Arrange
        with tempfile.TemporaryDirectory() as tmpdir:
            out = Path(tmpdir) / "bell.json"

            # Act
            code = main(["demo", "bell", "--exact", "--seed", "3", "--out", str(out)])

            # Assert
            self.assertEqual(code, EXIT_OK)
            report = json.loads(out.read_text())
            self.assertTrue(report["passed"])
            self.assertEqual(report["name"], "bell")
        self.assertIn("PASS", mock_stdout.getvalue())

    @patch("sys.stderr", new_callable=io.StringIO)
    def test_usage_error(self, mock_stderr, mock_stdout):
        # Arrange, Act
        code = main(["submit", "--source", "bell"])

        # Assert
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("--connect", mock_stderr.getvalue())

    @patch("sys.stderr", new_callable=io.StringIO)
    @patch("blindqc.protocol.client.wait_for_server_reachability")
    def test_unreachable_server(self, mock_probe, mock_stderr, mock_stdout):
        # Arrange
        mock_probe.return_value = False

        # Act
        code = main(["demo", "bell", "--connect", "127.0.0.1:1"])

        # Assert
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("unreachable", mock_stderr.getvalue())

    @patch("sys.stderr", new_callable=io.StringIO)
    @patch("blindqc.cli.run_demo")
    def test_zero_acceptance(self, mock_run_demo, mock_stderr, mock_stdout):
        # Arrange
        mock_run_demo.side_effect = ZeroAcceptanceError(10)

        # Act
        code = main(["demo", "ghz", "--shots", "10"])

        # Assert
        self.assertEqual(code, EXIT_FAILURE)
        self.assertIn("--shots", mock_stderr.getvalue())

    def test_keygen(self, mock_stdout):
        # Arrange
        with tempfile.TemporaryDirectory() as tmpdir:
            out = Path(tmpdir) / "trapdoor.json"

            # Act
            code = main(["keygen", "--seed", "4", "--out", str(out)])

            # Assert
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(load_key(out).d0, 1)
        self.assertIn("Public A:", mock_stdout.getvalue())

    @patch("blindqc.cli.certify_grid")
    def test_certify_test_key_fails(self, mock_certify_grid, mock_stdout):
        # Arrange
        mock_certify_grid.return_value = []

        # Act
        code = main(["certify", "--test-key"])

        # Assert
        self.assertEqual(code, EXIT_FAILURE)
        self.assertIn("FAIL", mock_stdout.getvalue())


if __name__ == "__main__":
    unittest.main()
