# type: ignore
import unittest
from unittest import TestCase

from blindqc.exceptions import FilterError
from blindqc.mbqc.compiler import compile_1q
from blindqc.mbqc.frame import calibrate_frame
from blindqc.protocol.compose import compose
from blindqc.protocol.filtering import (
    ClientSecrets,
    FilterReport,
    accepted_substrings,
    filter_distribution,
    filter_shots,
)
from blindqc.qfactory.rsp import RspInstance, theta_table
from blindqc.qfactory.trapdoor import TrapdoorKey
from blindqc.qsim.circuit import Gate
from blindqc.ubqc.blinding import blind
from blindqc.utils.bits import outcome_string
from blindqc.utils.modes import BranchMode, FilterMode

KEY_10 = TrapdoorKey(1, 0)


def shot(y, b, measured, output) -> str:
    return outcome_string([*y, *b, measured, output])


class TestAcceptedSubstrings(TestCase):
    def test_substrings_prepare_target(self):
        # Arrange
        inst = RspInstance(KEY_10, (1, 2))
        table = theta_table(inst)

        for target in range(8):
            # Act
            substrings = accepted_substrings(inst, target)

            # Assert
            self.assertEqual(list(substrings), sorted(substrings))
            for substring in substrings:
                self.assertEqual(table[substring].k, target)

    def test_every_outcome_is_accepted_for_some_target(self):
        # Arrange
        inst = RspInstance(KEY_10, (1, 2))

        # Act
        total = sum(len(accepted_substrings(inst, target)) for target in range(8))

        # Assert
        self.assertEqual(total, 16)


class TestClientSecrets(TestCase):
    def setUp(self):
        self.pattern = compile_1q([(Gate.RZ, 1), Gate.H])
        self.blinded = blind(self.pattern, seed=3)
        target = self.blinded.secrets.theta[0].k
        alpha = next(
            (a1, a2)
            for a1 in range(8)
            for a2 in range(8)
            if len(accepted_substrings(RspInstance(KEY_10, (a1, a2)), target)) > 1
        )
        self.rsp = {0: RspInstance(KEY_10, alpha)}
        self.job = compose(self.blinded, self.rsp, shots=100)

    def test_exact_mode_keeps_smallest_substring(self):
        # Arrange, Act
        secrets = ClientSecrets("job-0001", self.blinded, self.rsp, None)

        # Assert
        candidates = accepted_substrings(self.rsp[0], self.blinded.secrets.theta[0].k)
        self.assertEqual(secrets.accepted[0], frozenset({candidates[0]}))
        self.assertEqual(secrets.target_substring(0), candidates[0])

    def test_theta_mode_keeps_all_matches(self):
        # Arrange, Act
        secrets = ClientSecrets("job-0001", self.blinded, self.rsp, None, FilterMode.THETA_MATCH)

        # Assert
        candidates = accepted_substrings(self.rsp[0], self.blinded.secrets.theta[0].k)
        self.assertEqual(secrets.accepted[0], frozenset(candidates))
        self.assertGreater(len(secrets.accepted[0]), 1)

    def test_frame_decode_needs_frame(self):
        # Arrange, Act, Assert
        with self.assertRaises(FilterError):
            ClientSecrets("job-0001", self.blinded, self.rsp, None, branch_mode=BranchMode.FRAME_DECODE)

    def test_repr_hides_secrets(self):
        # Arrange
        secrets = ClientSecrets("job-0001", self.blinded, self.rsp, None)

        # Act
        text = repr(secrets)

        # Assert
        self.assertNotIn("theta", text)
        self.assertNotIn("RspInstance", text)

    def test_filter_zero_branch(self):
        # Arrange
        secrets = ClientSecrets("job-0001", self.blinded, self.rsp, None)
        y, b = secrets.target_substring(0)
        wrong_b = (b[0], 1 - b[1])
        counts = {
            shot(y, b, 0, 1): 7,
            shot(y, b, 1, 0): 3,
            shot(y, wrong_b, 0, 0): 5,
        }

        # Act
        report = filter_shots(counts, self.job.clbit_map, secrets)

        # Assert
        self.assertEqual(report.total_shots, 15)
        self.assertEqual(report.accepted_shots, 7)
        self.assertEqual(report.counts, {"1": 7})
        self.assertAlmostEqual(report.acceptance_rate, 7 / 15)
        self.assertEqual(report.distribution, {"1": 1.0})

    def test_filter_frame_decode(self):
        # Arrange
        frame = calibrate_frame(self.pattern)
        secrets = ClientSecrets("job-0001", self.blinded, self.rsp, frame, branch_mode=BranchMode.FRAME_DECODE)
        y, b = secrets.target_substring(0)
        counts = {shot(y, b, 0, 1): 4, shot(y, b, 1, 0): 6}

        # Act
        report = filter_shots(counts, self.job.clbit_map, secrets)

        # Assert
        self.assertEqual(report.accepted_shots, 10)
        self.assertEqual(report.counts, {"1": 10})

    def test_zero_acceptance_is_a_report(self):
        # Arrange
        secrets = ClientSecrets("job-0001", self.blinded, self.rsp, None)
        y, b = secrets.target_substring(0)
        counts = {shot(y, b, 1, 1): 9}

        # Act
        report = filter_shots(counts, self.job.clbit_map, secrets)

        # Assert
        self.assertEqual(report.accepted_shots, 0)
        self.assertEqual(report.distribution, {})

    def test_shot_width_mismatch(self):
        # Arrange
        secrets = ClientSecrets("job-0001", self.blinded, self.rsp, None)

        # Act, Assert
        with self.assertRaises(FilterError):
            filter_shots({"0101": 1}, self.job.clbit_map, secrets)

    def test_filter_distribution_normalizes(self):
        # Arrange
        secrets = ClientSecrets("job-0001", self.blinded, self.rsp, None)
        y, b = secrets.target_substring(0)
        distribution = {shot(y, b, 0, 0): 0.01, shot(y, b, 0, 1): 0.03, shot(y, b, 1, 1): 0.5}

        # Act
        report = filter_distribution(distribution, self.job.clbit_map, secrets)

        # Assert
        self.assertAlmostEqual(report.acceptance, 0.04)
        self.assertAlmostEqual(report.distribution["0"], 0.25)
        self.assertAlmostEqual(report.distribution["1"], 0.75)


class TestFilterReport(TestCase):
    def test_inconsistent_counts(self):
        # Arrange, Act, Assert
        with self.assertRaises(FilterError):
            FilterReport(10, 5, {"0": 4})
        with self.assertRaises(FilterError):
            FilterReport(3, 5, {"0": 5})

    def test_to_model(self):
        # Arrange
        report = FilterReport(8, 2, {"1": 2})

        # Act
        model = report.to_model()

        # Assert
        self.assertEqual(model.rate, 0.25)
        self.assertEqual(model.counts, {"1": 2})


if __name__ == "__main__":
    unittest.main()
