# type: ignore
import unittest
from unittest import TestCase

from parameterized import parameterized  # type: ignore

from blindqc.utils.bits import clbit_values, format_bits, outcome_string, parse_bits, xor_bits
from blindqc.utils.stats import (
    histogram,
    normalize_counts,
    total_variation_distance,
    uniformity_p_value,
    within_sigma,
)


class TestBits(TestCase):
    def test_parse_and_format(self):
        # Arrange, Act, Assert
        self.assertEqual(parse_bits("0110"), (0, 1, 1, 0))
        self.assertEqual(format_bits((0, 1, 1, 0)), "0110")

    def test_parse_rejects_other_characters(self):
        # Arrange, Act, Assert
        with self.assertRaises(ValueError):
            parse_bits("012")

    def test_clbit_zero_is_rightmost(self):
        # Arrange, Act
        values = clbit_values("1100")

        # Assert
        self.assertEqual(values, (0, 0, 1, 1))
        self.assertEqual(outcome_string(values), "1100")

    @parameterized.expand([([], 0), ([1], 1), ([1, 1], 0), ([1, 0, 1, 1], 1)])
    def test_xor_bits(self, values, expected):
        # Arrange, Act, Assert
        self.assertEqual(xor_bits(values), expected)


class TestStats(TestCase):
    def test_total_variation_distance(self):
        # Arrange
        p = {"00": 0.5, "11": 0.5}
        q = {"00": 0.25, "01": 0.25, "11": 0.5}

        # Act, Assert
        self.assertAlmostEqual(total_variation_distance(p, q), 0.25)
        self.assertEqual(total_variation_distance(p, p), 0.0)

    def test_normalize_counts(self):
        # Arrange, Act, Assert
        self.assertEqual(normalize_counts({"1": 3, "0": 1}), {"0": 0.25, "1": 0.75})
        self.assertEqual(normalize_counts({}), {})

    def test_uniform_samples(self):
        # Arrange
        samples = list(range(8)) * 100

        # Act
        p_value = uniformity_p_value(samples)

        # Assert
        self.assertAlmostEqual(p_value, 1.0)

    def test_skewed_samples(self):
        # Arrange
        samples = [0] * 400 + list(range(8)) * 50

        # Act
        p_value = uniformity_p_value(samples)

        # Assert
        self.assertLess(p_value, 1e-3)

    def test_histogram(self):
        # Arrange, Act, Assert
        self.assertEqual(histogram([0, 0, 7]), [2, 0, 0, 0, 0, 0, 0, 1])

    @parameterized.expand([(0.0625, 0.0625, 19200, True), (0.09, 0.0625, 19200, False)])
    def test_within_sigma(self, observed, expected, trials, result):
        # Arrange, Act, Assert
        self.assertEqual(within_sigma(observed, expected, trials), result)


if __name__ == "__main__":
    unittest.main()
