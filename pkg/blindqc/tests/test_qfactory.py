# type: ignore
import itertools
import tempfile
import unittest
from pathlib import Path
from unittest import TestCase
from unittest.mock import patch

from attr import evolve  # type: ignore
from parameterized import parameterized  # type: ignore
from pydantic import ValidationError

from blindqc.exceptions import (
    CertificationError,
    LayoutError,
    StatePreparationFailedError,
    ThetaCalibrationError,
)
from blindqc.mbqc.angle import Angle8
from blindqc.qfactory.certify import (
    ALL_ALPHAS,
    calibrate_theta_rule,
    certify,
    certify_grid,
    theta_coverage,
)
from blindqc.qfactory.oracle import build_oracle, emit_oracle
from blindqc.qfactory.rsp import (
    CALIBRATED_THETA_RULE,
    RspInstance,
    RspLayout,
    SignSource,
    SqueezeSite,
    ThetaRule,
    build_rsp_circuit,
    candidate_rules,
    compute_theta,
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
from blindqc.qsim.circuit import CircuitBuilder, Gate, Instruction
from blindqc.qsim.simulator import enumerate_branches, final_state

KEY_10 = TrapdoorKey(1, 0)
KEY_11 = TrapdoorKey(1, 1)
ALL_Y = [format(value, "02b") for value in range(4)]


class TestTrapdoor(TestCase):
    def test_degenerate_key_needs_test_mode(self):
        # Arrange, Act, Assert
        with self.assertRaises(ValueError):
            TrapdoorKey(0, 1)
        TrapdoorKey(0, 1, test_mode=True)

    @parameterized.expand([(2, 0), (1, -1)])
    def test_key_bits(self, d0, e):
        # Arrange, Act, Assert
        with self.assertRaises(ValueError):
            TrapdoorKey(d0, e)

    def test_key_repr_hides_test_flag(self):
        # Arrange, Act, Assert
        self.assertEqual(repr(KEY_10), "TrapdoorKey(d0=1, e=0)")

    def test_public_matrices_e0(self):
        # Arrange, Act
        public = PublicMatrices.from_key(KEY_10)

        # Assert
        self.assertEqual(public.A, ((1, 0, 0), (0, 0, 1), (0, 0, 0)))
        self.assertEqual(public.B, ((0, 0, 0), (0, 1, 0), (0, 0, 1)))

    def test_public_matrices_e1(self):
        # Arrange, Act
        public = PublicMatrices.from_key(KEY_11)

        # Assert
        self.assertEqual(public.A, ((0, 0, 1), (0, 1, 0), (0, 0, 0)))
        self.assertEqual(public.B, ((1, 0, 0), (0, 0, 0), (0, 0, 1)))
        self.assertEqual(public.ones("A"), [(0, 2), (1, 1)])

    def test_matrix_must_be_binary(self):
        # Arrange, Act, Assert
        with self.assertRaises(ValueError):
            PublicMatrices([[2, 0, 0]] * 3, [[0, 0, 0]] * 3)

    @parameterized.expand([(seed,) for seed in range(10)])
    def test_keygen(self, seed):
        # Arrange, Act
        key, public = keygen(seed)

        # Assert
        self.assertEqual(key.d0, 1)
        self.assertIn(key, VALID_KEYS)
        self.assertEqual(public, PublicMatrices.from_key(key))

    def test_keygen_is_seeded(self):
        # Arrange, Act, Assert
        self.assertEqual(keygen(21), keygen(21))

    @parameterized.expand([("101", (1, 1)), ("110", (1, 1)), ("000", (0, 0)), ("001", (0, 1)), ((1, 1, 1), (0, 0))])
    def test_eval_f(self, x, expected):
        # Arrange
        public = PublicMatrices.from_key(KEY_10)

        # Act, Assert
        self.assertEqual(eval_f(public, x), expected)

    @parameterized.expand([(KEY_10,), (KEY_11,)])
    def test_two_regular(self, key):
        # Arrange, Act
        table = preimages(PublicMatrices.from_key(key))

        # Assert
        self.assertEqual(len(table), 4)
        for xs in table.values():
            self.assertEqual(len(xs), 2)
            self.assertNotEqual(xs[0][2], xs[1][2])

    @parameterized.expand([(KEY_10, "11", (1, 0, 1), (1, 1, 0)), (KEY_10, "00", (0, 0, 0), (1, 1, 1))])
    def test_invert_examples(self, key, y, x, x_prime):
        # Arrange, Act, Assert
        self.assertEqual(invert(key, y), (x, x_prime))

    @parameterized.expand([(key, y) for key in VALID_KEYS for y in ALL_Y])
    def test_invert_matches_brute_force(self, key, y):
        # Arrange
        public = PublicMatrices.from_key(key)

        # Act
        x, x_prime = invert(key, y)

        # Assert
        self.assertEqual(eval_f(public, x), tuple(int(c) for c in y))
        self.assertEqual(eval_f(public, x_prime), tuple(int(c) for c in y))
        self.assertEqual(sorted([x, x_prime]), sorted(preimages(public)[tuple(int(c) for c in y)]))

    def test_invert_degenerate_key(self):
        # Arrange
        key = TrapdoorKey(0, 0, test_mode=True)

        # Act, Assert
        with self.assertRaises(StatePreparationFailedError):
            invert(key, "10")

    def test_key_file(self):
        # Arrange
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "trapdoor.json"

            # Act
            save_key(KEY_11, path)
            loaded = load_key(path)
            content = path.read_text()

        # Assert
        self.assertEqual(loaded, KEY_11)
        self.assertIn('"d0":1', content.replace(" ", ""))

    def test_key_file_rejects_degenerate_key(self):
        # Arrange
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "trapdoor.json"
            path.write_text('{"d0": 0, "e": 1}')

            # Act, Assert
            with self.assertRaises(ValidationError):
                load_key(path)


class TestOracle(TestCase):
    def test_gates_for_key(self):
        # Arrange, Act
        oracle = build_oracle(PublicMatrices.from_key(KEY_10))

        # Assert
        self.assertEqual(
            list(oracle.instructions),
            [
                Instruction(Gate.CX, (0, 3)),
                Instruction(Gate.CCX, (1, 2, 3)),
                Instruction(Gate.CX, (1, 4)),
                Instruction(Gate.CX, (2, 4)),
            ],
        )

    @parameterized.expand([(key, x, t) for key in VALID_KEYS for x in range(8) for t in range(4)])
    def test_basis_action(self, key, x, t):
        # Arrange
        public = PublicMatrices.from_key(key)
        bits = [(x >> i) & 1 for i in range(3)]
        builder = CircuitBuilder(5)
        for qubit, bit in enumerate(bits + [t & 1, t >> 1]):
            if bit:
                builder.x(qubit)
        builder.compose(build_oracle(public))
        y1, y2 = eval_f(public, bits)
        expected = x + (((t & 1) ^ y1) << 3) + (((t >> 1) ^ y2) << 4)

        # Act
        state = final_state(builder.build())

        # Assert
        self.assertAlmostEqual(abs(state.amplitudes[expected]), 1.0)

    def test_emit_oracle_layout(self):
        # Arrange
        builder = CircuitBuilder(5)

        # Act, Assert
        with self.assertRaises(LayoutError):
            emit_oracle(builder, PublicMatrices.from_key(KEY_10), [0, 1], [3, 4])


class TestRspCircuit(TestCase):
    def test_default_layout(self):
        # Arrange, Act
        circuit = build_rsp_circuit(RspInstance(KEY_10, (1, 2)))

        # Assert
        self.assertEqual(circuit.num_qubits, 5)
        self.assertEqual(circuit.num_clbits, 4)
        self.assertEqual(circuit.num_measurements, 4)
        self.assertNotIn(2, [inst.qubits[0] for inst in circuit.instructions if inst.gate == Gate.MEASURE])

    def test_squeeze_rotations(self):
        # Arrange, Act
        circuit = build_rsp_circuit(RspInstance(KEY_10, (1, 2)))

        # Assert
        rotations = [inst for inst in circuit.instructions if inst.gate == Gate.RZ]
        self.assertEqual([(inst.qubits, inst.k) for inst in rotations], [((0,), 7), ((1,), 6)])

    def test_alpha_is_reduced(self):
        # Arrange, Act
        inst = RspInstance(KEY_10, (9, -1))

        # Assert
        self.assertEqual(inst.alpha, (Angle8(1), Angle8(7)))

    def test_alpha_pair_length(self):
        # Arrange, Act, Assert
        with self.assertRaises(LayoutError):
            RspInstance(KEY_10, (1, 2, 3))

    def test_public_must_match_key(self):
        # Arrange, Act, Assert
        with self.assertRaises(LayoutError):
            RspInstance(KEY_10, (0, 0), public=PublicMatrices.from_key(KEY_11))

    @parameterized.expand(
        [
            ((0, 1, 1), (3, 4), (0, 1, 2, 3)),
            ((0, 1, 2), (2, 4), (0, 1, 2, 3)),
            ((0, 1, 2), (3, 4), (0, 1, 1, 3)),
            ((0, 1, -2), (3, 4), (0, 1, 2, 3)),
        ]
    )
    def test_invalid_layout(self, controls, targets, clbits):
        # Arrange, Act, Assert
        with self.assertRaises(LayoutError):
            RspLayout(controls, targets, clbits)

    def test_custom_layout(self):
        # Arrange
        layout = RspLayout((4, 0, 6), (1, 2), (3, 0, 1, 2))

        # Act
        circuit = build_rsp_circuit(RspInstance(KEY_11, (0, 0), layout))

        # Assert
        self.assertEqual(circuit.num_qubits, 7)
        self.assertEqual(layout.state_qubit, 6)

    def test_split_outcome(self):
        # Arrange
        inst = RspInstance(KEY_10, (0, 0))

        # Act
        y, b = split_outcome(inst, "1001")

        # Assert
        self.assertEqual(y, (1, 0))
        self.assertEqual(b, (0, 1))

    def test_server_view_has_no_key(self):
        # Arrange
        inst = RspInstance(KEY_11, (3, 5))

        # Act
        view = inst.server_view().model_dump()

        # Assert
        self.assertEqual(set(view), {"A", "B", "alpha", "layout"})
        self.assertEqual(view["alpha"], [3, 5])
        self.assertNotIn("key", repr(inst))


class TestTheta(TestCase):
    def test_compute_theta_example(self):
        # Arrange
        inst = RspInstance(KEY_10, (0, 0))

        # Act
        theta = compute_theta(inst, (1, 0, 1), (1, 1, 0), (0, 1))

        # Assert
        self.assertEqual(theta, Angle8(4))

    def test_theta_for_outcome(self):
        # Arrange
        inst = RspInstance(KEY_10, (0, 0))

        # Act, Assert
        self.assertEqual(theta_for_outcome(inst, (1, 1), (0, 1)), Angle8(4))

    def test_rule_for_other_site(self):
        # Arrange
        inst = RspInstance(KEY_10, (0, 0))
        rule = ThetaRule(SqueezeSite.TARGETS, (0, 1), SignSource.FIRST)

        # Act, Assert
        with self.assertRaises(ThetaCalibrationError):
            compute_theta(inst, (1, 0, 1), (1, 1, 0), (0, 1), rule)

    def test_candidate_rules(self):
        # Arrange, Act
        rules = list(candidate_rules())

        # Assert
        self.assertEqual(len(rules), 12)
        self.assertIn(CALIBRATED_THETA_RULE, rules)

    def test_theta_table(self):
        # Arrange
        inst = RspInstance(KEY_11, (2, 5))

        # Act
        table = theta_table(inst)

        # Assert
        self.assertEqual(len(table), 16)
        self.assertEqual(set(y for y, _ in table), set(itertools.product((0, 1), repeat=2)))

    def test_theta_table_degenerate_key(self):
        # Arrange
        inst = RspInstance(TrapdoorKey(0, 1, test_mode=True), (0, 0))

        # Act, Assert
        with self.assertLogs("blindqc.qfactory.rsp", level="WARNING"):
            self.assertEqual(theta_table(inst), {})


class TestCertify(TestCase):
    def test_grid_passes(self):
        # Arrange, Act
        reports = certify_grid(ALL_ALPHAS)

        # Assert
        self.assertEqual(len(reports), 128)
        for report in reports:
            self.assertTrue(report.passed, report.alpha)
            self.assertAlmostEqual(report.total_probability, 1.0)
            self.assertEqual(len(report.branches), 16)
            for row in report.branches:
                self.assertAlmostEqual(row.probability, 1 / 16)

    def test_degenerate_key_fails(self):
        # Arrange
        inst = RspInstance(TrapdoorKey(0, 0, test_mode=True), (0, 0))

        # Act
        report = certify(inst, raises=False)

        # Assert
        self.assertFalse(report.passed)
        self.assertTrue(all(row.error for row in report.failures))

    def test_degenerate_key_raises(self):
        # Arrange
        inst = RspInstance(TrapdoorKey(0, 1, test_mode=True), (4, 4))

        # Act, Assert
        with self.assertRaises(CertificationError):
            certify(inst)

    def test_wrong_rule_fails(self):
        # Arrange
        inst = RspInstance(KEY_10, (1, 3))
        rule = ThetaRule(SqueezeSite.CONTROLS, (1, 0), SignSource.NONE)

        # Act
        report = certify(inst, rule=rule, raises=False)

        # Assert
        self.assertFalse(report.passed)

    def test_theta_distribution(self):
        # Arrange, Act
        report = certify(RspInstance(KEY_10, (1, 2)))

        # Assert
        self.assertAlmostEqual(sum(report.theta_distribution.values()), 1.0)
        self.assertEqual(sorted(report.theta_distribution), sorted(set(row.theta for row in report.branches)))

    def test_expected_theta_distribution(self):
        # Arrange, Act
        report = certify(RspInstance(KEY_10, (1, 2)))

        # Assert
        self.assertEqual(report.distribution_errors, [])
        for theta, probability in report.expected_theta_distribution.items():
            self.assertAlmostEqual(report.theta_distribution[theta], probability)

    def test_skewed_branch_probability_raises(self):
        # Arrange
        inst = RspInstance(KEY_10, (1, 2))
        branches = enumerate_branches(build_rsp_circuit(inst))
        skewed = [evolve(branches[0], probability=branches[0].probability * 2)] + branches[1:]

        # Act, Assert
        with patch("blindqc.qfactory.certify.enumerate_branches", return_value=skewed):
            with self.assertRaises(CertificationError) as context:
                certify(inst)
        self.assertIn("sum to", context.exception.message)

    def test_theta_law_violation_raises(self):
        # Arrange
        inst = RspInstance(KEY_10, (1, 2))
        branches = enumerate_branches(build_rsp_circuit(inst))
        thetas = [row.theta for row in certify(inst).branches]
        first = 0
        second = next(i for i, theta in enumerate(thetas) if theta != thetas[first])
        shifted = list(branches)
        shifted[first] = evolve(branches[first], probability=branches[first].probability + 1 / 32)
        shifted[second] = evolve(branches[second], probability=branches[second].probability - 1 / 32)

        # Act
        with patch("blindqc.qfactory.certify.enumerate_branches", return_value=shifted):
            report = certify(inst, raises=False)
            with self.assertRaises(CertificationError):
                certify(inst)

        # Assert
        self.assertAlmostEqual(report.total_probability, 1.0)
        self.assertTrue(all(row.passed for row in report.branches))
        self.assertFalse(report.passed)
        self.assertEqual(len(report.distribution_errors), 2)

    def test_calibration(self):
        # Arrange, Act
        rule = calibrate_theta_rule()

        # Assert
        self.assertEqual(rule, CALIBRATED_THETA_RULE)

    def test_calibration_without_survivor(self):
        # Arrange
        key = TrapdoorKey(0, 0, test_mode=True)

        # Act, Assert
        with self.assertRaises(ThetaCalibrationError):
            calibrate_theta_rule(alphas=[(0, 0)], keys=[key])

    def test_theta_coverage(self):
        # Arrange, Act
        reached = theta_coverage()

        # Assert
        self.assertEqual(reached, [Angle8(k) for k in range(8)])

    def test_coverage_of_single_alpha(self):
        # Arrange, Act
        reached = theta_coverage(alphas=[(0, 0)])

        # Assert
        self.assertTrue(set(angle.k for angle in reached) <= {0, 4})


if __name__ == "__main__":
    unittest.main()
